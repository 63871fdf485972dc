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

//! Turning the RID techniques off one at a time over a fixed query suite.

use predjoin_core::planner::{plan_baseline, rewrite_predefined, CardMode, CardinalitySource};
use predjoin_core::sqlfront::parse_query;
use predjoin_core::{AblationFlags, Catalog, Error, Result, ZoneConfig};
use serde::Serialize;

use crate::{measure, Timing};

/// `(name, SQL)` over the social schema. Constants assume the default ids
/// `1..=n_person` and timestamps starting in 2010.
pub const ABLATION_SUITE: [(&str, &str); 10] = [
    (
        "two-hop-names",
        "SELECT p1.name, p3.name FROM Person p1, Knows k1, Person p2, Knows k2, Person p3 \
         WHERE p1.id = k1.id1 AND k1.id2 = p2.id AND p2.id = k2.id1 AND k2.id2 = p3.id AND p1.id <= 20",
    ),
    (
        "two-hop-dates",
        "SELECT p1.name, k2.creationDate, p3.name FROM Person p1, Knows k1, Person p2, Knows k2, Person p3 \
         WHERE p1.id = k1.id1 AND k1.id2 = p2.id AND p2.id = k2.id1 AND k2.id2 = p3.id AND p1.id <= 20",
    ),
    (
        "three-hop-count",
        "SELECT COUNT(*) FROM Person p1, Knows k1, Person p2, Knows k2, Person p3, Knows k3, Person p4 \
         WHERE p1.id = k1.id1 AND k1.id2 = p2.id AND p2.id = k2.id1 AND k2.id2 = p3.id \
         AND p3.id = k3.id1 AND k3.id2 = p4.id AND p1.id <= 3",
    ),
    (
        "three-hop-country",
        "SELECT p1.name, p4.name FROM Person p1, Knows k1, Person p2, Knows k2, Person p3, Knows k3, Person p4 \
         WHERE p1.id = k1.id1 AND k1.id2 = p2.id AND p2.id = k2.id1 AND k2.id2 = p3.id \
         AND p3.id = k3.id1 AND k3.id2 = p4.id AND p1.id <= 2 AND p4.country = 'Peru'",
    ),
    (
        "one-hop-both-ends",
        "SELECT COUNT(*) FROM Person p1, Knows k, Person p2 \
         WHERE p1.id = k.id1 AND k.id2 = p2.id AND p1.id <= 100 AND p2.country = 'Japan'",
    ),
    (
        "incoming",
        "SELECT p1.name FROM Person p1, Knows k, Person p2 WHERE p1.id = k.id1 AND k.id2 = p2.id AND p2.id <= 30",
    ),
    (
        "two-hop-recent",
        "SELECT COUNT(*) FROM Person p1, Knows k1, Person p2, Knows k2, Person p3 \
         WHERE p1.id = k1.id1 AND k1.id2 = p2.id AND p2.id = k2.id1 AND k2.id2 = p3.id \
         AND p1.id <= 50 AND k2.creationDate <= 1420070400000",
    ),
    (
        "creator-comments",
        "SELECT p.name, c.content FROM Person p, Comment c WHERE c.creatorId = p.id AND p.id <= 50",
    ),
    (
        "friends-comments",
        "SELECT COUNT(*) FROM Person p1, Knows k, Person p2, Comment c \
         WHERE p1.id = k.id1 AND k.id2 = p2.id AND c.creatorId = p2.id AND p1.id <= 10",
    ),
    (
        "early-commenters-friends",
        "SELECT MIN(p1.name) FROM Person p1, Knows k, Person p2, Comment c \
         WHERE p1.id = k.id1 AND k.id2 = p2.id AND c.creatorId = p1.id AND c.id <= 20",
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub query: String,
    pub config: &'static str,
    pub wall_ms: f64,
    pub tuples_materialized: u64,
    pub scan_operators: usize,
    pub result_rows: u64,
}

/// Plans each query once and runs it under the four presets, checking that
/// every preset returns the vanilla result.
pub fn run_ablation(
    catalog: &Catalog,
    suite: &[(&str, &str)],
    zones: ZoneConfig,
    timing: Timing,
) -> Result<Vec<AblationRow>> {
    let mut rows = Vec::new();
    for &(name, sql) in suite {
        let query = parse_query(sql, catalog)?;
        let mut cards = CardinalitySource::new(catalog, &query, CardMode::Exact);
        let baseline = plan_baseline(&query, &mut cards)?;
        let mut reference = None;
        for flags in AblationFlags::PRESETS.into_iter().rev() {
            let plan = rewrite_predefined(&baseline, catalog, flags);
            let (result, stats, wall_ms) = measure(&plan, catalog, zones, timing)?;
            let sorted = result.sorted_rows();
            match &reference {
                None => reference = Some(sorted),
                Some(r) if *r != sorted => {
                    return Err(Error::Internal(format!("{name}: {flags} result differs from vanilla")));
                }
                Some(_) => {}
            }
            rows.push(AblationRow {
                query: name.to_string(),
                config: flags.name(),
                wall_ms,
                tuples_materialized: stats.tuples_materialized(),
                scan_operators: plan.scan_count(),
                result_rows: stats.result_rows,
            });
        }
    }
    Ok(rows)
}
