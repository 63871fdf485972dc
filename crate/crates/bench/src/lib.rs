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

//! Benchmark protocols over the predjoin engine: synthetic social data,
//! selectivity microbenchmarks, optimization ablations and plan spectra,
//! plus a random database/query corpus for differential testing.

pub mod ablation;
pub mod corpus;
pub mod micro;
pub mod plot;
pub mod report;
pub mod social;
pub mod spectrum;

use predjoin_core::exec::{execute, ExecStats, ResultSet};
use predjoin_core::{Catalog, LogicalPlan, Result, ZoneConfig};

pub use ablation::{run_ablation, AblationRow, ABLATION_SUITE};
pub use micro::{run_micro, MicroKind, MicroRow, MicroSpec};
pub use social::{generate_social, predefine_social, SocialDbConfig};
pub use spectrum::{run_spectrum, SpectrumReport, SPECTRUM_QUERIES};

/// Repetitions of a timed execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timing {
    pub warmup: usize,
    pub runs: usize,
}

impl Default for Timing {
    fn default() -> Self {
        Timing { warmup: 1, runs: 5 }
    }
}

impl Timing {
    /// A single untimed-warmup run, for counter-only checks.
    pub const ONCE: Timing = Timing { warmup: 0, runs: 1 };
}

/// Executes `plan` `timing.warmup + timing.runs` times and returns the
/// result and counters of the first timed run with the median wall time.
pub fn measure(
    plan: &LogicalPlan,
    catalog: &Catalog,
    zones: ZoneConfig,
    timing: Timing,
) -> Result<(ResultSet, ExecStats, f64)> {
    for _ in 0..timing.warmup {
        execute(plan, catalog, zones)?;
    }
    let (result, stats) = execute(plan, catalog, zones)?;
    let mut times = vec![stats.wall_ms];
    for _ in 1..timing.runs {
        times.push(execute(plan, catalog, zones)?.1.wall_ms);
    }
    Ok((result, stats, median(&mut times)))
}

pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Value `v` such that `x <= v` holds for a `selectivity` fraction of `values`
/// (at least one row).
pub fn quantile_threshold(values: &[i64], selectivity: f64) -> i64 {
    if values.is_empty() {
        return i64::MIN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let k = ((selectivity * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

/// Scan counters summed over the scans of the given aliases.
pub fn scan_tuples(stats: &ExecStats, aliases: &[&str]) -> u64 {
    stats
        .ops
        .iter()
        .filter(|o| (o.op == "Scan" || o.op == "ScanSJ") && aliases.contains(&o.label.as_str()))
        .map(|o| o.tuples_materialized)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&mut []), 0.0);
    }

    #[test]
    fn thresholds_hit_exact_quantiles() {
        let v: Vec<i64> = (1..=1000).rev().collect();
        assert_eq!(quantile_threshold(&v, 0.001), 1);
        assert_eq!(quantile_threshold(&v, 0.01), 10);
        assert_eq!(quantile_threshold(&v, 1.0), 1000);
        assert_eq!(quantile_threshold(&v, 0.0001), 1);
    }
}
