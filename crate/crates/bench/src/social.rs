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

//! Seeded generator for a small social network: persons, a skewed
//! `Knows` relationship and comments.

use std::fmt::Write as _;
use std::path::Path;

use predjoin_core::{Catalog, DataType, Result, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

/// Salt of the RNG stream that draws out-degrees, so they can be replayed alone.
pub const DEGREE_STREAM: u64 = 0x6b6e_6f77_735f_6467;

/// First timestamp handed out, 2010-01-01T00:00:00Z in milliseconds.
pub const DATE_START_MS: i64 = 1_262_304_000_000;
/// Width of the timestamp range, ten years in milliseconds.
pub const DATE_SPAN_MS: i64 = 315_360_000_000;

const FIRST_NAMES: &[&str] = &[
    "Ada", "Bo", "Chen", "Dara", "Emeka", "Fatima", "Goran", "Hana", "Ines", "Jun", "Karim", "Lena", "Mateo",
    "Nia", "Omar", "Priya", "Quinn", "Rosa", "Sven", "Tariq", "Uma", "Vera", "Wei", "Yusuf", "Zhang",
];
const COUNTRIES: &[&str] = &[
    "Argentina", "Brazil", "Canada", "Denmark", "Egypt", "France", "Ghana", "India", "Japan", "Kenya", "Mexico",
    "Nepal", "Peru", "Spain", "Turkey", "Vietnam",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SocialDbConfig {
    pub n_person: usize,
    /// Target mean out-degree of `Knows`.
    pub avg_degree: f64,
    pub n_comment_per_person: usize,
    pub seed: u64,
    pub zipf_exponent: f64,
}

impl Default for SocialDbConfig {
    fn default() -> Self {
        SocialDbConfig {
            n_person: 10_000,
            avg_degree: 50.0,
            n_comment_per_person: 2,
            seed: 42,
            zipf_exponent: 1.2,
        }
    }
}

/// Smallest support `n` whose Zipf(`n`, `s`) mean minus one reaches `avg_degree`.
pub fn zipf_support(avg_degree: f64, s: f64) -> u64 {
    let (mut num, mut den) = (0.0f64, 0.0f64);
    let mut n = 0u64;
    loop {
        n += 1;
        let k = n as f64;
        num += k.powf(1.0 - s);
        den += k.powf(-s);
        if num / den - 1.0 >= avg_degree || n >= 100_000_000 {
            return n;
        }
    }
}

/// Out-degree of every person, in person order.
pub fn sample_degrees(config: &SocialDbConfig) -> Vec<usize> {
    if config.n_person == 0 {
        return Vec::new();
    }
    let n = zipf_support(config.avg_degree, config.zipf_exponent);
    let zipf = Zipf::new(n as f64, config.zipf_exponent).expect("valid Zipf parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ DEGREE_STREAM);
    (0..config.n_person).map(|_| zipf.sample(&mut rng) as usize - 1).collect()
}

/// `count` distinct timestamps spread uniformly over the fixed range, in random order.
fn distinct_dates(count: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let step = (DATE_SPAN_MS / count.max(1) as i64).max(1);
    let mut slots: Vec<i64> = (0..count as i64).collect();
    slots.shuffle(rng);
    slots
        .into_iter()
        .map(|s| DATE_START_MS + s * step + rng.random_range(0..step))
        .collect()
}

/// Builds `Person(id, name, country)`, `Knows(id1, id2, creationDate)` and
/// `Comment(id, creatorId, creationDate, content)`.
///
/// Person ids are `1..=n_person` in row order. `Knows` rows are grouped by
/// `id1`; `id2` and comment creators are uniform over persons. Timestamps
/// are milliseconds and distinct within each table.
pub fn generate_social(config: &SocialDbConfig) -> Catalog {
    let mut cat = Catalog::new();
    let person = cat
        .create_table(
            "Person",
            &[("id", DataType::Int64), ("name", DataType::Str), ("country", DataType::Str)],
        )
        .expect("fresh catalog");
    let knows = cat
        .create_table(
            "Knows",
            &[
                ("id1", DataType::Int64),
                ("id2", DataType::Int64),
                ("creationDate", DataType::Int64),
            ],
        )
        .expect("fresh catalog");
    let comment = cat
        .create_table(
            "Comment",
            &[
                ("id", DataType::Int64),
                ("creatorId", DataType::Int64),
                ("creationDate", DataType::Int64),
                ("content", DataType::Str),
            ],
        )
        .expect("fresh catalog");

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_person as i64;
    for id in 1..=n {
        let name = format!("{}{id}", FIRST_NAMES[rng.random_range(0..FIRST_NAMES.len())]);
        let country = COUNTRIES[rng.random_range(0..COUNTRIES.len())];
        cat.append_row(person, vec![Value::Int64(id), Value::str(&name), Value::str(country)])
            .expect("schema matches");
    }

    let degrees = sample_degrees(config);
    let edges: usize = degrees.iter().sum();
    let dates = distinct_dates(edges, &mut rng);
    let mut e = 0;
    for (i, &d) in degrees.iter().enumerate() {
        for _ in 0..d {
            let id2 = rng.random_range(1..=n);
            cat.append_row(knows, vec![Value::Int64(i as i64 + 1), Value::Int64(id2), Value::Int64(dates[e])])
                .expect("schema matches");
            e += 1;
        }
    }

    let comments = config.n_person * config.n_comment_per_person;
    let dates = distinct_dates(comments, &mut rng);
    for (c, date) in dates.into_iter().enumerate() {
        let creator = rng.random_range(1..=n);
        let content = format!("comment {c} by {creator}");
        cat.append_row(
            comment,
            vec![
                Value::Int64(c as i64 + 1),
                Value::Int64(creator),
                Value::Int64(date),
                Value::str(&content),
            ],
        )
        .expect("schema matches");
    }
    cat
}

/// Predefines every foreign key of the social schema and builds the RID
/// indices, including extended indices through `Knows` in both directions.
pub fn predefine_social(cat: &mut Catalog) -> Result<()> {
    let k1 = cat.predefine_join_by_name("Knows", &["id1"], "Person", &["id"])?;
    let k2 = cat.predefine_join_by_name("Knows", &["id2"], "Person", &["id"])?;
    let c = cat.predefine_join_by_name("Comment", &["creatorId"], "Person", &["id"])?;
    for j in [k1, k2, c] {
        cat.build_rid_index(j)?;
    }
    cat.build_extended_rid_index(k1, k2)?;
    cat.build_extended_rid_index(k2, k1)?;
    Ok(())
}

/// DDL that recreates the predefined joins and indices of [`predefine_social`].
pub const SOCIAL_PREDEFINE_SQL: &str = "\
PREDEFINE JOIN Knows(id1) REFERENCES Person(id);
PREDEFINE JOIN Knows(id2) REFERENCES Person(id);
PREDEFINE JOIN Comment(creatorId) REFERENCES Person(id);
CREATE RID INDEX ON Knows REFERENCES Person(id1);
CREATE RID INDEX ON Knows REFERENCES Person(id2);
CREATE RID INDEX ON Comment REFERENCES Person(creatorId);
CREATE EXTENDED RID INDEX ON Knows FROM Person(id1) TO Person(id2);
CREATE EXTENDED RID INDEX ON Knows FROM Person(id2) TO Person(id1);
";

/// Renders the user columns of `table` as headerless CSV.
pub fn table_csv(cat: &Catalog, table: &str) -> Result<String> {
    let id = cat.table_id(table)?;
    let t = cat.table(id);
    let cols: Vec<usize> = t.user_columns().collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in 0..t.row_count() {
        w.write_record(cols.iter().map(|&c| t.value(c, row).to_string()))
            .map_err(|e| predjoin_core::Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| predjoin_core::Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 values"))
}

/// Writes `Person.csv`, `Knows.csv`, `Comment.csv` and a `load.sql` script
/// that recreates the database with its predefined joins.
pub fn write_social_dir(cat: &Catalog, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut script = String::new();
    script.push_str("CREATE TABLE Person (id BIGINT, name VARCHAR, country VARCHAR);\n");
    script.push_str("CREATE TABLE Knows (id1 BIGINT, id2 BIGINT, creationDate BIGINT);\n");
    script.push_str("CREATE TABLE Comment (id BIGINT, creatorId BIGINT, creationDate BIGINT, content VARCHAR);\n");
    for table in ["Person", "Knows", "Comment"] {
        std::fs::write(dir.join(format!("{table}.csv")), table_csv(cat, table)?)?;
        let _ = writeln!(script, "COPY {table} FROM '{table}.csv';");
    }
    script.push_str(SOCIAL_PREDEFINE_SQL);
    std::fs::write(dir.join("load.sql"), script)?;
    Ok(())
}
