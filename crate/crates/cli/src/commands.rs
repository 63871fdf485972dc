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

use std::io::Write;
use std::path::Path;

use predjoin_bench::plot::{line_chart, Chart, Series};
use predjoin_bench::report::write_rows;
use predjoin_bench::social::write_social_dir;
use predjoin_bench::{
    generate_social, predefine_social, run_ablation, run_micro, run_spectrum, MicroSpec, SocialDbConfig, Timing,
    ABLATION_SUITE, SPECTRUM_QUERIES,
};
use predjoin_core::{Catalog, Session, SessionConfig, StatementResult, ZoneConfig};

use crate::args::{BenchArgs, Cli, Command, DataArgs, ScriptArgs};
use crate::CliError;

type CliResult<T = ()> = Result<T, CliError>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::User(format!("{}: {e}", path.display()))
}

fn zones(size: usize) -> CliResult<ZoneConfig> {
    Ok(ZoneConfig::new(size)?)
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

pub fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> CliResult {
    match &cli.command {
        Command::Run(a) => script(a, false, out),
        Command::Explain(a) => script(a, true, out),
        Command::BenchMicro(a) => {
            let cat = social(&a.bench.data)?;
            let spec = MicroSpec::new(a.which.kind());
            let rows = run_micro(&cat, &spec, zones(a.bench.zone_size)?, timing(&a.bench))?;
            if let Some(path) = &a.plot {
                let series = ["vanilla", "predefined"]
                    .iter()
                    .map(|mode| Series {
                        name: mode.to_string(),
                        points: rows
                            .iter()
                            .filter(|r| r.mode == *mode)
                            .map(|r| (r.selectivity, r.wall_ms))
                            .collect(),
                    })
                    .collect::<Vec<_>>();
                let chart = Chart {
                    title: a.which.kind().name(),
                    x_label: "selectivity",
                    y_label: "wall ms",
                    log_x: true,
                    steps: false,
                };
                write_file(path, line_chart(&chart, &series).as_bytes())?;
            }
            report(&rows, &a.bench, out)
        }
        Command::BenchAblation(a) => {
            let cat = social(&a.data)?;
            let rows = run_ablation(&cat, &ABLATION_SUITE, zones(a.zone_size)?, timing(a))?;
            report(&rows, a, out)
        }
        Command::BenchSpectrum(a) => {
            let selected: Vec<_> = SPECTRUM_QUERIES
                .iter()
                .filter(|(name, _)| a.query.as_deref().is_none_or(|q| q == *name))
                .collect();
            if selected.is_empty() {
                let names: Vec<_> = SPECTRUM_QUERIES.iter().map(|(n, _)| *n).collect();
                return Err(CliError::User(format!(
                    "unknown spectrum query, expected one of {}",
                    names.join(", ")
                )));
            }
            let cat = social(&a.bench.data)?;
            let z = zones(a.bench.zone_size)?;
            let mut entries = Vec::new();
            let mut series = Vec::new();
            for (name, sql) in selected {
                let r = run_spectrum(&cat, name, sql, a.cap.unwrap_or(usize::MAX), z, timing(&a.bench), None)?;
                for (label, pick) in [("baseline", 0), ("rewritten", 1)] {
                    series.push(Series {
                        name: format!("{name} {label}"),
                        points: r
                            .cdf_wall_ms
                            .iter()
                            .map(|c| (c.threshold, [c.baseline, c.rewritten][pick] as f64))
                            .collect(),
                    });
                }
                entries.extend(r.entries.iter().map(|e| SpectrumLine {
                    query: name,
                    plan_id: e.plan_id,
                    variant: e.variant,
                    wall_ms: e.wall_ms,
                    tuples_materialized: e.tuples_materialized,
                }));
            }
            if let Some(path) = &a.plot {
                let chart = Chart {
                    title: "plan spectrum",
                    x_label: "wall ms",
                    y_label: "plans within",
                    log_x: true,
                    steps: true,
                };
                write_file(path, line_chart(&chart, &series).as_bytes())?;
            }
            report(&entries, &a.bench, out)
        }
        Command::GenData(a) => {
            let cat = generate_social(&social_config(&a.data)?);
            write_social_dir(&cat, &a.out).map_err(|e| io_err(&a.out, e))?;
            let _ = writeln!(out, "wrote {}", a.out.display());
            Ok(())
        }
    }
}

#[derive(serde::Serialize)]
struct SpectrumLine<'a> {
    query: &'a str,
    plan_id: usize,
    variant: predjoin_bench::spectrum::Variant,
    wall_ms: f64,
    tuples_materialized: u64,
}

fn timing(a: &BenchArgs) -> Timing {
    Timing {
        warmup: 1,
        runs: a.runs.max(1),
    }
}

fn social_config(d: &DataArgs) -> CliResult<SocialDbConfig> {
    if !(d.avg_degree.is_finite() && d.avg_degree > 0.0) {
        return Err(CliError::User("--avg-degree must be positive".into()));
    }
    Ok(SocialDbConfig {
        n_person: d.n_person,
        avg_degree: d.avg_degree,
        n_comment_per_person: d.comments_per_person,
        seed: d.seed,
        ..SocialDbConfig::default()
    })
}

fn social(d: &DataArgs) -> CliResult<Catalog> {
    let mut cat = generate_social(&social_config(d)?);
    predefine_social(&mut cat)?;
    Ok(cat)
}

fn report<T: serde::Serialize>(rows: &[T], a: &BenchArgs, out: &mut Vec<u8>) -> CliResult {
    match &a.output {
        Some(path) => {
            let mut buf = Vec::new();
            write_rows(rows, a.format.into(), &mut buf)?;
            write_file(path, &buf)
        }
        None => Ok(write_rows(rows, a.format.into(), out)?),
    }
}

fn script(a: &ScriptArgs, explain_only: bool, out: &mut Vec<u8>) -> CliResult {
    let (text, base) = match (&a.script, &a.statement) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (text, base)
        }
        (None, Some(stmt)) => (stmt.clone(), std::env::current_dir().unwrap_or_default()),
        (None, None) => return Err(CliError::User("no statements given".into())),
    };
    let config = SessionConfig {
        zones: zones(a.engine.zone_size)?,
        cards: a.engine.cards()?,
        flags: a.engine.flags(),
    };
    let mut session = Session::new(config);
    session.set_base_dir(&base);
    let results = if explain_only {
        session.explain_script(&text)
    } else {
        session.run_script(&text)
    };
    let results = results.map_err(|e| {
        let msg = format!("{}: {e}", a.script.as_deref().map_or("<statement>".into(), |p| p.display().to_string()));
        if e.error.is_internal() {
            CliError::Internal(msg)
        } else {
            CliError::User(msg)
        }
    })?;
    let mut stats = Vec::new();
    let mut first = true;
    for r in results {
        match r {
            StatementResult::Done(_) => {}
            StatementResult::Query { result, stats: s, .. } => {
                if !first {
                    out.push(b'\n');
                }
                first = false;
                result.write_csv(&mut *out, true)?;
                stats.push(s);
            }
            StatementResult::Explain { baseline, rewritten } => {
                if !first {
                    out.push(b'\n');
                }
                first = false;
                let _ = write!(out, "-- baseline\n{baseline}-- rewritten ({})\n{rewritten}", session.config().flags);
            }
        }
    }
    if let Some(path) = &a.stats {
        let json = serde_json::to_string_pretty(&stats).expect("stats serialize");
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}
