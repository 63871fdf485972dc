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

//! Executing every join order of a query with and without the rewrite.

use predjoin_core::planner::{enumerate_plans, rewrite_predefined};
use predjoin_core::sqlfront::parse_query;
use predjoin_core::{AblationFlags, Catalog, Error, Result, ZoneConfig};
use serde::Serialize;

use crate::{measure, Timing};

/// Four-relation queries, each with one selective filter on an end point.
pub const SPECTRUM_QUERIES: [(&str, &str); 3] = [
    (
        "friends-comments",
        "SELECT COUNT(*) FROM Person p1, Knows k, Person p2, Comment c \
         WHERE p1.id = k.id1 AND k.id2 = p2.id AND c.creatorId = p2.id AND p1.id <= 5",
    ),
    (
        "two-hop-prefix",
        "SELECT COUNT(*) FROM Person p1, Knows k1, Person p2, Knows k2 \
         WHERE p1.id = k1.id1 AND k1.id2 = p2.id AND p2.id = k2.id1 AND p1.id <= 5",
    ),
    (
        "commenter-friends",
        "SELECT COUNT(*) FROM Comment c, Person p1, Knows k, Person p2 \
         WHERE c.creatorId = p1.id AND p1.id = k.id1 AND k.id2 = p2.id AND p2.id <= 5",
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    #[serde(rename = "baseline")]
    Baseline,
    #[serde(rename = "rewritten")]
    Rewritten,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub plan_id: usize,
    pub variant: Variant,
    pub wall_ms: f64,
    pub tuples_materialized: u64,
}

/// Number of plans per variant whose cost is at most `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfRow {
    pub threshold: f64,
    pub baseline: usize,
    pub rewritten: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub query: String,
    pub entries: Vec<SpectrumEntry>,
    pub cdf_wall_ms: Vec<CdfRow>,
    pub cdf_tuples: Vec<CdfRow>,
}

impl SpectrumReport {
    fn costs(&self, variant: Variant, f: impl Fn(&SpectrumEntry) -> f64) -> Vec<f64> {
        self.entries.iter().filter(|e| e.variant == variant).map(f).collect()
    }

    /// With the best baseline `tuples_materialized` as the bound: how many
    /// baseline and rewritten plans stay within it.
    pub fn good_plans(&self) -> (usize, usize) {
        let tuples = |e: &SpectrumEntry| e.tuples_materialized as f64;
        let base = self.costs(Variant::Baseline, tuples);
        let best = base.iter().copied().fold(f64::INFINITY, f64::min);
        let within = |xs: Vec<f64>| xs.into_iter().filter(|&x| x <= best).count();
        (within(base), within(self.costs(Variant::Rewritten, tuples)))
    }
}

/// `n` log-spaced thresholds spanning `values`.
pub fn log_thresholds(values: &[f64], n: usize) -> Vec<f64> {
    let lo = values.iter().copied().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(0.0f64, f64::max);
    if !lo.is_finite() || hi <= 0.0 || n < 2 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn cdf(report: &SpectrumReport, thresholds: &[f64], f: impl Fn(&SpectrumEntry) -> f64 + Copy) -> Vec<CdfRow> {
    let base = report.costs(Variant::Baseline, f);
    let rewritten = report.costs(Variant::Rewritten, f);
    thresholds
        .iter()
        .map(|&t| CdfRow {
            threshold: t,
            baseline: base.iter().filter(|&&x| x <= t).count(),
            rewritten: rewritten.iter().filter(|&&x| x <= t).count(),
        })
        .collect()
}

/// Runs the first `cap` enumerated plans of `sql` as generated and as
/// rewritten with every technique on. `thresholds` are wall-clock bounds
/// for the time CDF; log-spaced when absent.
pub fn run_spectrum(
    catalog: &Catalog,
    name: &str,
    sql: &str,
    cap: usize,
    zones: ZoneConfig,
    timing: Timing,
    thresholds: Option<&[f64]>,
) -> Result<SpectrumReport> {
    let query = parse_query(sql, catalog)?;
    let plans = enumerate_plans(&query, cap)?;
    let mut report = SpectrumReport {
        query: name.to_string(),
        entries: Vec::new(),
        cdf_wall_ms: Vec::new(),
        cdf_tuples: Vec::new(),
    };
    let mut reference = None;
    for (id, plan) in plans.iter().enumerate() {
        let rewritten = rewrite_predefined(plan, catalog, AblationFlags::FULL);
        for (variant, p) in [(Variant::Baseline, plan), (Variant::Rewritten, &rewritten)] {
            let (result, stats, wall_ms) = measure(p, catalog, zones, timing)?;
            let sorted = result.sorted_rows();
            match &reference {
                None => reference = Some(sorted),
                Some(r) if *r != sorted => {
                    return Err(Error::Internal(format!("{name}: plan {id} {variant:?} result differs")));
                }
                Some(_) => {}
            }
            report.entries.push(SpectrumEntry {
                plan_id: id,
                variant,
                wall_ms,
                tuples_materialized: stats.tuples_materialized(),
            });
        }
    }
    let times: Vec<f64> = report.entries.iter().map(|e| e.wall_ms).collect();
    let tuples: Vec<f64> = report.entries.iter().map(|e| e.tuples_materialized as f64).collect();
    let time_thresholds = thresholds.map_or_else(|| log_thresholds(&times, 20), <[f64]>::to_vec);
    report.cdf_wall_ms = cdf(&report, &time_thresholds, |e| e.wall_ms);
    report.cdf_tuples = cdf(&report, &log_thresholds(&tuples, 20), |e| e.tuples_materialized as f64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::social::{generate_social, predefine_social, SocialDbConfig};

    #[test]
    fn chain_of_three_runs_sixteen_times() {
        let mut cat = generate_social(&SocialDbConfig {
            n_person: 200,
            avg_degree: 4.0,
            ..SocialDbConfig::default()
        });
        predefine_social(&mut cat).unwrap();
        let sql = "SELECT COUNT(*) FROM Person p1, Knows k, Person p2 WHERE p1.id = k.id1 AND k.id2 = p2.id AND p1.id <= 3";
        let zones = ZoneConfig::new(64).unwrap();
        let r = run_spectrum(&cat, "q", sql, usize::MAX, zones, Timing::ONCE, None).unwrap();
        assert_eq!(r.entries.len(), 16);
        for pair in r.entries.chunks(2) {
            assert!(pair[1].tuples_materialized <= pair[0].tuples_materialized);
        }
        let r = run_spectrum(&cat, "q", sql, 1, zones, Timing::ONCE, Some(&[1.0, 1e9])).unwrap();
        assert_eq!(r.entries.len(), 2);
        assert_eq!(r.cdf_wall_ms.last().unwrap().baseline, 1);
        for rows in [&r.cdf_wall_ms, &r.cdf_tuples] {
            for w in rows.windows(2) {
                assert!(w[0].baseline <= w[1].baseline && w[0].rewritten <= w[1].rewritten);
            }
        }
    }

    #[test]
    fn thresholds_are_log_spaced() {
        let t = log_thresholds(&[1.0, 100.0, 10.0], 3);
        assert!((t[1] - 10.0).abs() < 1e-9);
        assert_eq!(t.len(), 3);
    }
}
