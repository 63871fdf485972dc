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

//! Cardinalities of relation subsets for the join-order search.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::sqlfront::{ColRef, Query};
use crate::storage::{Catalog, Table, TableId, Value};

/// Where the planner takes subset cardinalities from.
#[derive(Debug, Clone, PartialEq)]
pub enum CardMode {
    /// Counts obtained by evaluating the subquery.
    Exact,
    /// Exact single-table filter counts, joins at `1 / max(ndv)`.
    Estimate,
    /// Counts keyed by comma-separated sorted alias lists; misses fall back to `Estimate`.
    User(HashMap<String, f64>),
}

impl CardMode {
    /// Reads a JSON object such as `{"F1,P1": 3, "P1": 1}`.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HashMap<String, f64> = serde_json::from_str(text)
            .map_err(|e| Error::Io(format!("bad cardinality file: {e}")))?;
        let map = raw.into_iter().map(|(k, v)| (normalize_key(&k), v)).collect();
        Ok(CardMode::User(map))
    }
}

fn normalize_key(key: &str) -> String {
    let mut parts: Vec<&str> = key.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    parts.sort_unstable();
    parts.join(",")
}

/// Memoizing cardinality oracle for one planning session.
pub struct CardinalitySource<'a> {
    catalog: &'a Catalog,
    query: &'a Query,
    mode: CardMode,
    memo: HashMap<u64, f64>,
    filtered: Vec<Option<Vec<usize>>>,
    ndv: HashMap<(TableId, usize), usize>,
}

impl<'a> CardinalitySource<'a> {
    pub fn new(catalog: &'a Catalog, query: &'a Query, mode: CardMode) -> Self {
        CardinalitySource {
            catalog,
            query,
            mode,
            memo: HashMap::new(),
            filtered: vec![None; query.relations.len()],
            ndv: HashMap::new(),
        }
    }

    pub fn cardinality(&mut self, mask: u64) -> f64 {
        if let Some(&c) = self.memo.get(&mask) {
            return c;
        }
        let c = match &self.mode {
            CardMode::Exact => {
                for rel in bits(mask) {
                    self.filtered_rows(rel);
                }
                let rows: Vec<&[usize]> = (0..self.query.relations.len())
                    .map(|r| self.filtered[r].as_deref().unwrap_or(&[]))
                    .collect();
                count_join(self.catalog, self.query, mask, &rows) as f64
            }
            CardMode::Estimate => self.estimate(mask),
            CardMode::User(map) => {
                let mut names: Vec<&str> = bits(mask).map(|r| self.query.relations[r].alias.as_str()).collect();
                names.sort_unstable();
                match map.get(&names.join(",")) {
                    Some(&c) => c,
                    None => self.estimate(mask),
                }
            }
        };
        self.memo.insert(mask, c);
        c
    }

    fn filtered_rows(&mut self, rel: usize) -> &[usize] {
        if self.filtered[rel].is_none() {
            self.filtered[rel] = Some(filter_rows(self.catalog, self.query, rel));
        }
        self.filtered[rel].as_deref().unwrap()
    }

    fn distinct(&mut self, c: ColRef) -> usize {
        let table = self.query.relations[c.rel].table;
        let catalog = self.catalog;
        *self.ndv.entry((table, c.column)).or_insert_with(|| {
            let t = catalog.table(table);
            let keys = KeyCols::new(t, &[c.column]);
            let set: std::collections::HashSet<Key> = (0..t.row_count()).map(|r| keys.key(r)).collect();
            set.len()
        })
    }

    fn estimate(&mut self, mask: u64) -> f64 {
        let mut card = 1.0;
        for rel in bits(mask) {
            card *= self.filtered_rows(rel).len() as f64;
        }
        let query = self.query;
        for p in &query.joins {
            if mask >> p.left.rel & 1 == 1 && mask >> p.right.rel & 1 == 1 {
                let d = self.distinct(p.left).max(self.distinct(p.right)).max(1);
                card /= d as f64;
            }
        }
        card
    }
}

/// Number of result tuples of the subquery over the relations in `mask`,
/// with every filter and join predicate among them applied.
pub fn exact_cardinality(catalog: &Catalog, query: &Query, mask: u64) -> u64 {
    let rows: Vec<Vec<usize>> = (0..query.relations.len())
        .map(|r| if mask >> r & 1 == 1 { filter_rows(catalog, query, r) } else { Vec::new() })
        .collect();
    let rows: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
    count_join(catalog, query, mask, &rows)
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn filter_rows(catalog: &Catalog, query: &Query, rel: usize) -> Vec<usize> {
    let table = catalog.table(query.relations[rel].table);
    let mut sel = Bitmap::all_set(table.row_count());
    for f in query.filters_of(rel) {
        f.apply(table.data(f.column.column), &mut sel);
    }
    sel.iter_ones().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Int(i64),
    Multi(Vec<Value>),
}

struct KeyCols<'t> {
    table: &'t Table,
    cols: Vec<usize>,
    int: Option<&'t [i64]>,
}

impl<'t> KeyCols<'t> {
    fn new(table: &'t Table, cols: &[usize]) -> Self {
        let int = match cols {
            [c] if table.column(*c).data_type.is_integral() => Some(table.int_data(*c)),
            _ => None,
        };
        KeyCols {
            table,
            cols: cols.to_vec(),
            int,
        }
    }

    fn key(&self, row: usize) -> Key {
        match self.int {
            Some(v) => Key::Int(v[row]),
            None => Key::Multi(self.cols.iter().map(|&c| self.table.value(c, row)).collect()),
        }
    }
}

type Edges = BTreeMap<(usize, usize), Vec<(usize, usize)>>;

/// Join predicates inside `mask`, grouped per relation pair `(a, b)` with `a < b`.
fn edges_within(query: &Query, mask: u64) -> Edges {
    let mut edges: Edges = BTreeMap::new();
    for p in &query.joins {
        let (l, r) = (p.left, p.right);
        if mask >> l.rel & 1 == 0 || mask >> r.rel & 1 == 0 {
            continue;
        }
        let (a, b) = if l.rel < r.rel { (l, r) } else { (r, l) };
        edges.entry((a.rel, b.rel)).or_default().push((a.column, b.column));
    }
    edges
}

fn edge_cols(edges: &Edges, u: usize, v: usize) -> (Vec<usize>, Vec<usize>) {
    if u < v {
        let e = &edges[&(u, v)];
        (e.iter().map(|x| x.0).collect(), e.iter().map(|x| x.1).collect())
    } else {
        let e = &edges[&(v, u)];
        (e.iter().map(|x| x.1).collect(), e.iter().map(|x| x.0).collect())
    }
}

fn count_join(catalog: &Catalog, query: &Query, mask: u64, rows: &[&[usize]]) -> u64 {
    if mask == 0 {
        return 0;
    }
    let edges = edges_within(query, mask);
    let n = mask.count_ones() as usize;
    let total = if edges.len() + 1 == n && query.is_connected(mask) {
        count_tree(catalog, query, mask, rows, &edges)
    } else {
        count_enumerate(catalog, query, mask, rows, &edges)
    };
    total.min(u64::MAX as u128) as u64
}

fn table_of<'c>(catalog: &'c Catalog, query: &Query, rel: usize) -> &'c Table {
    catalog.table(query.relations[rel].table)
}

/// Counts an acyclic join by summing per-key subtree weights bottom-up.
fn count_tree(catalog: &Catalog, query: &Query, mask: u64, rows: &[&[usize]], edges: &Edges) -> u128 {
    let root = mask.trailing_zeros() as usize;
    fn weights(
        u: usize,
        parent: Option<usize>,
        catalog: &Catalog,
        query: &Query,
        rows: &[&[usize]],
        edges: &Edges,
    ) -> Vec<u128> {
        let mut w = vec![1u128; rows[u].len()];
        let neighbors: Vec<usize> = edges
            .keys()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .filter(|&v| Some(v) != parent)
            .collect();
        for c in neighbors {
            let wc = weights(c, Some(u), catalog, query, rows, edges);
            let (u_cols, c_cols) = edge_cols(edges, u, c);
            let ck = KeyCols::new(table_of(catalog, query, c), &c_cols);
            let mut sums: HashMap<Key, u128> = HashMap::new();
            for (i, &r) in rows[c].iter().enumerate() {
                if wc[i] != 0 {
                    *sums.entry(ck.key(r)).or_default() += wc[i];
                }
            }
            let uk = KeyCols::new(table_of(catalog, query, u), &u_cols);
            for (i, &r) in rows[u].iter().enumerate() {
                if w[i] != 0 {
                    w[i] = w[i].saturating_mul(sums.get(&uk.key(r)).copied().unwrap_or(0));
                }
            }
        }
        w
    }
    weights(root, None, catalog, query, rows, edges)
        .into_iter()
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Counts by materializing partial tuples; used for cyclic or disconnected subsets.
fn count_enumerate(catalog: &Catalog, query: &Query, mask: u64, rows: &[&[usize]], edges: &Edges) -> u128 {
    // Visit order: connected relations first so that every step has a lookup edge when possible.
    let mut order = vec![mask.trailing_zeros() as usize];
    let mut remaining = mask & !(1 << order[0]);
    while remaining != 0 {
        let next = bits(remaining)
            .find(|&r| order.iter().any(|&q| edges.contains_key(&(r.min(q), r.max(q)))))
            .unwrap_or_else(|| remaining.trailing_zeros() as usize);
        order.push(next);
        remaining &= !(1 << next);
    }
    let mut partial: Vec<Vec<usize>> = rows[order[0]].iter().map(|&r| vec![r]).collect();
    for (pos, &r) in order.iter().enumerate().skip(1) {
        let placed = &order[..pos];
        let linked: Vec<usize> = (0..pos)
            .filter(|&i| edges.contains_key(&(r.min(placed[i]), r.max(placed[i]))))
            .collect();
        let rt = table_of(catalog, query, r);
        let mut next = Vec::new();
        if let Some((&first, rest)) = linked.split_first() {
            let q = placed[first];
            let (r_cols, q_cols) = edge_cols(edges, r, q);
            let rk = KeyCols::new(rt, &r_cols);
            let mut map: HashMap<Key, Vec<usize>> = HashMap::new();
            for &row in rows[r] {
                map.entry(rk.key(row)).or_default().push(row);
            }
            let qk = KeyCols::new(table_of(catalog, query, q), &q_cols);
            for t in &partial {
                let Some(cands) = map.get(&qk.key(t[first])) else {
                    continue;
                };
                for &row in cands {
                    let ok = rest.iter().all(|&i| {
                        let (rc, oc) = edge_cols(edges, r, placed[i]);
                        let ot = table_of(catalog, query, placed[i]);
                        rc.iter().zip(&oc).all(|(&a, &b)| rt.value(a, row) == ot.value(b, t[i]))
                    });
                    if ok {
                        let mut t2 = t.clone();
                        t2.push(row);
                        next.push(t2);
                    }
                }
            }
        } else {
            for t in &partial {
                for &row in rows[r] {
                    let mut t2 = t.clone();
                    t2.push(row);
                    next.push(t2);
                }
            }
        }
        partial = next;
    }
    partial.len() as u128
}
