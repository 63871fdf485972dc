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

//! Selectivity microbenchmarks on the one-hop Person-Knows-Person query.

use predjoin_core::exec::execute;
use predjoin_core::planner::{plan_baseline, rewrite_predefined, CardMode, CardinalitySource};
use predjoin_core::sqlfront::parse_query;
use predjoin_core::{AblationFlags, Catalog, Error, Result, ZoneConfig};
use serde::Serialize;

use crate::{measure, quantile_threshold, scan_tuples, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MicroKind {
    /// Sweep the filter on `Person.id`, fix the one on `Knows.creationDate`.
    #[serde(rename = "MICRO-P")]
    P,
    /// Sweep the filter on `Knows.creationDate`, fix the one on `Person.id`.
    #[serde(rename = "MICRO-K")]
    K,
}

impl MicroKind {
    pub fn name(self) -> &'static str {
        match self {
            MicroKind::P => "MICRO-P",
            MicroKind::K => "MICRO-K",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroSpec {
    pub which: MicroKind,
    pub fixed_selectivity: f64,
    pub swept_selectivities: Vec<f64>,
}

impl MicroSpec {
    pub fn new(which: MicroKind) -> Self {
        MicroSpec {
            which,
            fixed_selectivity: 0.999,
            swept_selectivities: vec![0.0001, 0.001, 0.01, 0.1, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicroRow {
    pub selectivity: f64,
    pub mode: &'static str,
    pub wall_ms: f64,
    pub knows_tuples_materialized: u64,
    pub person_tuples_materialized: u64,
    pub total_tuples_materialized: u64,
    pub count: i64,
}

/// The one-hop query with `p1.id <= person_max AND k.creationDate <= date_max`.
pub fn micro_query(person_max: i64, date_max: i64) -> String {
    format!(
        "SELECT COUNT(*) FROM Person p1, Knows k, Person p2 \
         WHERE p1.id = k.id1 AND k.id2 = p2.id AND p1.id <= {person_max} AND k.creationDate <= {date_max}"
    )
}

fn int_column(cat: &Catalog, table: &str, column: &str) -> Result<Vec<i64>> {
    let t = cat.table_id(table)?;
    let c = cat.user_column(t, column)?;
    Ok(cat.table(t).int_data(c).to_vec())
}

/// Runs the sweep in vanilla and predefined mode. `catalog` must hold the
/// social schema with its joins predefined and indexed.
///
/// Both modes plan the same join order; vanilla executes it unrewritten.
pub fn run_micro(catalog: &Catalog, spec: &MicroSpec, zones: ZoneConfig, timing: Timing) -> Result<Vec<MicroRow>> {
    let ids = int_column(catalog, "Person", "id")?;
    let dates = int_column(catalog, "Knows", "creationDate")?;
    let mut rows = Vec::new();
    for &sel in &spec.swept_selectivities {
        let (ps, ks) = match spec.which {
            MicroKind::P => (sel, spec.fixed_selectivity),
            MicroKind::K => (spec.fixed_selectivity, sel),
        };
        let sql = micro_query(quantile_threshold(&ids, ps), quantile_threshold(&dates, ks));
        let query = parse_query(&sql, catalog)?;
        let mut cards = CardinalitySource::new(catalog, &query, CardMode::Exact);
        let baseline = plan_baseline(&query, &mut cards)?;
        let rewritten = rewrite_predefined(&baseline, catalog, AblationFlags::FULL);
        let reference = execute(&baseline, catalog, zones)?.0;
        for (mode, plan) in [("vanilla", &baseline), ("predefined", &rewritten)] {
            let (result, stats, wall_ms) = measure(plan, catalog, zones, timing)?;
            if result != reference {
                return Err(Error::Internal(format!("{mode} result differs at selectivity {sel}")));
            }
            let count = result.row(0)[0].as_i64().unwrap_or(0);
            rows.push(MicroRow {
                selectivity: sel,
                mode,
                wall_ms,
                knows_tuples_materialized: scan_tuples(&stats, &["k"]),
                person_tuples_materialized: scan_tuples(&stats, &["p1", "p2"]),
                total_tuples_materialized: stats.tuples_materialized(),
                count,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::social::{generate_social, predefine_social, SocialDbConfig};

    #[test]
    fn selective_person_filter_skips_knows_zones() {
        let mut cat = generate_social(&SocialDbConfig {
            n_person: 2000,
            avg_degree: 10.0,
            ..SocialDbConfig::default()
        });
        predefine_social(&mut cat).unwrap();
        let rows = run_micro(&cat, &MicroSpec::new(MicroKind::P), ZoneConfig::new(256).unwrap(), Timing::ONCE).unwrap();
        assert_eq!(rows.len(), 10);
        let knows = cat.table(cat.table_id("Knows").unwrap()).row_count() as u64;
        let (v, p) = (&rows[0], &rows[1]);
        assert_eq!((v.mode, p.mode), ("vanilla", "predefined"));
        assert_eq!(v.knows_tuples_materialized, knows);
        assert!(p.knows_tuples_materialized < knows);
        assert_eq!(v.count, p.count);
    }
}
