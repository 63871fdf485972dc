// Copyright 2026 The predjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Random small databases and connected conjunctive queries for
//! differential testing of plans against each other.

use predjoin_core::{Catalog, DataType, Value};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Upper bound on rows per generated table.
pub const MAX_ROWS: usize = 64;
/// Upper bound on relations per generated query.
pub const MAX_RELATIONS: usize = 4;

const NAMES: &[&str] = &["ann", "bob", "cy", "dee", "eve"];
const OPS: &[&str] = &["=", "<>", "<", "<=", ">", ">="];

/// A column-wise equality usable as a join between two tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub left: String,
    pub left_cols: Vec<String>,
    pub right: String,
    pub right_cols: Vec<String>,
}

pub struct RandomDb {
    pub catalog: Catalog,
    /// Foreign keys and other joinable column pairs.
    pub links: Vec<Link>,
    pub seed: u64,
}

fn link(left: &str, lc: &[&str], right: &str, rc: &[&str]) -> Link {
    Link {
        left: left.into(),
        left_cols: lc.iter().map(|s| s.to_string()).collect(),
        right: right.into(),
        right_cols: rc.iter().map(|s| s.to_string()).collect(),
    }
}

fn rows(rng: &mut ChaCha8Rng) -> usize {
    if rng.random_bool(0.05) {
        0
    } else {
        rng.random_range(1..=MAX_ROWS)
    }
}

/// Entity tables `E*(id, grp, val, name)` with unique `id`, and relationship
/// tables `R*(src, srcgrp, dst, w)` whose `(src, srcgrp)` and `dst` reference
/// entity rows. A random subset of the foreign keys is predefined and
/// indexed.
pub fn random_database(seed: u64) -> RandomDb {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cat = Catalog::new();
    let mut links = Vec::new();
    let n_entities = rng.random_range(1..=3);
    // (id, grp) of every entity row, per entity table.
    let mut keys: Vec<Vec<(i64, i64)>> = Vec::new();
    for e in 0..n_entities {
        let name = format!("E{e}");
        let t = cat
            .create_table(
                &name,
                &[
                    ("id", DataType::Int64),
                    ("grp", DataType::Int64),
                    ("val", DataType::Int64),
                    ("name", DataType::Str),
                ],
            )
            .expect("fresh name");
        let n = rows(&mut rng);
        let mut ids: Vec<i64> = (0..2 * MAX_ROWS as i64).collect();
        ids.shuffle(&mut rng);
        let mut k = Vec::new();
        for &id in &ids[..n] {
            let grp = rng.random_range(0..4);
            let val = rng.random_range(0..10);
            let nm = *NAMES.choose(&mut rng).expect("non-empty");
            cat.append_row(t, vec![Value::Int64(id), Value::Int64(grp), Value::Int64(val), Value::str(nm)])
                .expect("schema matches");
            k.push((id, grp));
        }
        keys.push(k);
        for prev in 0..e {
            let other = format!("E{prev}");
            links.push(link(&name, &["grp"], &other, &["grp"]));
            links.push(link(&name, &["val"], &other, &["val"]));
        }
        links.push(link(&name, &["val"], &name, &["grp"]));
    }

    let n_rel = rng.random_range(1..=3);
    let mut predefined = Vec::new();
    for r in 0..n_rel {
        let name = format!("R{r}");
        let (a, b) = (rng.random_range(0..n_entities), rng.random_range(0..n_entities));
        let t = cat
            .create_table(
                &name,
                &[
                    ("src", DataType::Int64),
                    ("srcgrp", DataType::Int64),
                    ("dst", DataType::Int64),
                    ("w", DataType::Int64),
                ],
            )
            .expect("fresh name");
        let n = if keys[a].is_empty() || keys[b].is_empty() { 0 } else { rows(&mut rng) };
        for _ in 0..n {
            let (src, grp) = *keys[a].choose(&mut rng).expect("non-empty");
            let (dst, _) = *keys[b].choose(&mut rng).expect("non-empty");
            let w = rng.random_range(0..10);
            cat.append_row(t, vec![Value::Int64(src), Value::Int64(grp), Value::Int64(dst), Value::Int64(w)])
                .expect("schema matches");
        }
        let (ea, eb) = (format!("E{a}"), format!("E{b}"));
        links.push(link(&name, &["src", "srcgrp"], &ea, &["id", "grp"]));
        links.push(link(&name, &["dst"], &eb, &["id"]));
        links.push(link(&name, &["w"], &eb, &["val"]));
        for prev in 0..r {
            links.push(link(&name, &["w"], &format!("R{prev}"), &["w"]));
        }
        let src_join = if rng.random_bool(0.7) {
            let (fc, pc): (&[&str], &[&str]) = if rng.random_bool(0.6) {
                (&["src"], &["id"])
            } else {
                (&["src", "srcgrp"], &["id", "grp"])
            };
            Some(cat.predefine_join_by_name(&name, fc, &ea, pc).expect("keys are total"))
        } else {
            None
        };
        let dst_join = if rng.random_bool(0.7) {
            Some(cat.predefine_join_by_name(&name, &["dst"], &eb, &["id"]).expect("keys are total"))
        } else {
            None
        };
        predefined.extend(src_join.into_iter().chain(dst_join));
        if let (Some(s), Some(d)) = (src_join, dst_join) {
            if rng.random_bool(0.6) {
                cat.build_extended_rid_index(s, d).expect("same relationship table");
            }
            if rng.random_bool(0.4) {
                cat.build_extended_rid_index(d, s).expect("same relationship table");
            }
        }
    }
    for j in predefined {
        if rng.random_bool(0.6) {
            cat.build_rid_index(j).expect("fresh index");
        }
    }
    RandomDb {
        catalog: cat,
        links,
        seed,
    }
}

fn random_filter(db: &RandomDb, alias: &str, table: &str, rng: &mut ChaCha8Rng) -> String {
    let op = OPS.choose(rng).expect("non-empty");
    let is_entity = table.starts_with('E');
    let col = if is_entity {
        *["id", "grp", "val", "name"].choose(rng).expect("non-empty")
    } else {
        *["src", "srcgrp", "dst", "w"].choose(rng).expect("non-empty")
    };
    let constant = match col {
        "name" => format!("'{}'", NAMES.choose(rng).expect("non-empty")),
        "grp" | "srcgrp" => rng.random_range(0..4).to_string(),
        "val" | "w" => rng.random_range(0..10).to_string(),
        _ => {
            let _ = db;
            rng.random_range(0..2 * MAX_ROWS as i64).to_string()
        }
    };
    format!("{alias}.{col} {op} {constant}")
}

fn int_columns(table: &str) -> &'static [&'static str] {
    if table.starts_with('E') {
        &["id", "grp", "val"]
    } else {
        &["src", "srcgrp", "dst", "w"]
    }
}

/// A connected conjunctive query over 1 to 4 relations of `db`.
pub fn random_query(db: &RandomDb, rng: &mut ChaCha8Rng) -> String {
    let k = *[1, 2, 2, 3, 3, 3, 4, 4, 4, 4].choose(rng).expect("non-empty");
    let tables: Vec<String> = db.catalog.tables().map(|(_, t)| t.name().to_string()).collect();
    let mut rels: Vec<(String, String)> = vec![("t0".into(), tables.choose(rng).expect("tables").clone())];
    let mut preds: Vec<String> = Vec::new();
    let push_link = |preds: &mut Vec<String>, l: &Link, la: &str, ra: &str, rng: &mut ChaCha8Rng| {
        for (i, (lc, rc)) in l.left_cols.iter().zip(&l.right_cols).enumerate() {
            // Composite links sometimes join on a prefix only.
            if i > 0 && rng.random_bool(0.25) {
                continue;
            }
            preds.push(format!("{la}.{lc} = {ra}.{rc}"));
        }
    };
    // Entity-relationship-entity paths are the shape join merging applies to.
    if k >= 3 && rng.random_bool(0.4) {
        let rel_tables: Vec<&String> = tables.iter().filter(|t| t.starts_with('R')).collect();
        if let Some(&r) = rel_tables.choose(rng) {
            let src = db.links.iter().find(|l| l.left == *r && l.left_cols[0] == "src");
            let dst = db.links.iter().find(|l| l.left == *r && l.left_cols == ["dst"]);
            if let (Some(src), Some(dst)) = (src, dst) {
                rels = vec![
                    ("t0".into(), src.right.clone()),
                    ("t1".into(), r.clone()),
                    ("t2".into(), dst.right.clone()),
                ];
                push_link(&mut preds, src, "t1", "t0", rng);
                push_link(&mut preds, dst, "t1", "t2", rng);
            }
        }
    }
    while rels.len() < k {
        let (alias, table) = rels.choose(rng).expect("non-empty").clone();
        let options: Vec<(&Link, bool)> = db
            .links
            .iter()
            .filter_map(|l| {
                if l.left == table {
                    Some((l, true))
                } else if l.right == table {
                    Some((l, false))
                } else {
                    None
                }
            })
            .collect();
        let Some(&(l, from_left)) = options.choose(rng) else {
            break;
        };
        let new_alias = format!("t{}", rels.len());
        let other = if from_left { &l.right } else { &l.left };
        if from_left {
            push_link(&mut preds, l, &alias, &new_alias, rng);
        } else {
            push_link(&mut preds, l, &new_alias, &alias, rng);
        }
        rels.push((new_alias, other.clone()));
    }
    // An occasional extra predicate closes a cycle.
    if rels.len() >= 3 && rng.random_bool(0.15) {
        let (a, ta) = rels.choose(rng).expect("non-empty").clone();
        let (b, tb) = rels.choose(rng).expect("non-empty").clone();
        if a != b {
            if let Some(l) = db.links.iter().find(|l| l.left == ta && l.right == tb) {
                push_link(&mut preds, l, &a, &b, rng);
            }
        }
    }
    for (alias, table) in &rels {
        if rng.random_bool(0.35) {
            preds.push(random_filter(db, alias, table, rng));
        }
    }
    let select = match rng.random_range(0..20) {
        0..=5 => "*".to_string(),
        6..=9 => "COUNT(*)".to_string(),
        10..=12 => {
            let (alias, table) = rels.choose(rng).expect("non-empty");
            let f = if rng.random_bool(0.5) { "MIN" } else { "MAX" };
            format!("{f}({alias}.{})", int_columns(table).choose(rng).expect("non-empty"))
        }
        _ => {
            let n = rng.random_range(1..=3);
            (0..n)
                .map(|_| {
                    let (alias, table) = rels.choose(rng).expect("non-empty");
                    format!("{alias}.{}", int_columns(table).choose(rng).expect("non-empty"))
                })
                .collect::<Vec<_>>()
                .join(", ")
        }
    };
    let from: Vec<String> = rels.iter().map(|(a, t)| format!("{t} {a}")).collect();
    let mut sql = format!("SELECT {select} FROM {}", from.join(", "));
    if !preds.is_empty() {
        sql.push_str(" WHERE ");
        sql.push_str(&preds.join(" AND "));
    }
    sql
}

/// `count` queries drawn from a stream seeded by the database seed.
pub fn random_queries(db: &RandomDb, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(db.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0x5157);
    (0..count).map(|_| random_query(db, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use predjoin_core::sqlfront::parse_query;

    #[test]
    fn queries_bind_and_are_connected() {
        for seed in 0..40 {
            let db = random_database(seed);
            for sql in random_queries(&db, 5) {
                let q = parse_query(&sql, &db.catalog).unwrap_or_else(|e| panic!("{sql}: {e}"));
                assert!(q.relations.len() <= MAX_RELATIONS);
                assert!(q.is_connected(q.all_rels()), "{sql}");
            }
        }
    }

    #[test]
    fn tables_respect_the_row_bound() {
        for seed in 0..40 {
            let db = random_database(seed);
            for (_, t) in db.catalog.tables() {
                assert!(t.row_count() <= MAX_ROWS);
            }
        }
    }
}
