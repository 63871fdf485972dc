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

//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::Oracle;
use predjoin_bench::corpus::{random_database, random_queries};
use predjoin_bench::micro::MicroRow;
use predjoin_bench::{
    generate_social, predefine_social, run_ablation, run_micro, run_spectrum, MicroKind, MicroSpec,
    SocialDbConfig, Timing, ABLATION_SUITE, SPECTRUM_QUERIES,
};
use predjoin_core::exec::{build_sip_filters, execute};
use predjoin_core::fixtures::{running_example, TWO_HOP_NAMES_QUERY, TWO_HOP_QUERY};
use predjoin_core::planner::{
    enumerate_plans, explain, plan_baseline, rewrite_predefined, CardMode, CardinalitySource, JoinVariant,
    LogicalPlan,
};
use predjoin_core::sqlfront::parse_query;
use predjoin_core::{AblationFlags, Catalog, Value, ZoneConfig};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

const CORPUS_SEEDS: u64 = 200;
const QUERIES_PER_DB: usize = 5;
const SJ_ZONE_SIZES: [usize; 4] = [1, 2, 7, 1024];
const BENCH_ZONE_SIZE: usize = 1024;

fn zones(n: usize) -> ZoneConfig {
    ZoneConfig::new(n).expect("positive zone size")
}

fn baseline(cat: &Catalog, sql: &str) -> LogicalPlan {
    let q = parse_query(sql, cat).expect("query binds");
    let mut cards = CardinalitySource::new(cat, &q, CardMode::Exact);
    plan_baseline(&q, &mut cards).expect("connected query")
}

/// Operator names in `explain` output, in pre-order.
fn explained_kinds(plan: &LogicalPlan, cat: &Catalog) -> Vec<String> {
    explain(plan, cat)
        .lines()
        .map(|l| l.split_whitespace().next().unwrap_or("").to_string())
        .collect()
}

fn criterion_1() -> Outcome {
    let mut cat = running_example();
    let near = cat.predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"]).map_err(|e| e.to_string())?;
    let far = cat.predefine_join_by_name("Follows", &["ID2"], "Person", &["ID"]).map_err(|e| e.to_string())?;
    ensure!(cat.rid_column_of(near) == [0, 2, 0, 1, 0], "R1 = {:?}", cat.rid_column_of(near));
    ensure!(cat.rid_column_of(far) == [1, 3, 2, 2, 3], "R2 = {:?}", cat.rid_column_of(far));

    // Filters passed to P2 and P3 for Karim's two-hop paths at zone size 2.
    let z = zones(2);
    let follows = cat.table(cat.table_id("Follows").unwrap());
    let karim_edges: Vec<usize> = (0..follows.row_count()).filter(|&r| follows.value(0, r) == Value::Int64(202)).collect();
    let p2: Vec<usize> = karim_edges.iter().map(|&r| cat.rid_column_of(far)[r] as usize).collect();
    let f2: Vec<usize> = (0..follows.row_count())
        .filter(|&r| p2.contains(&(cat.rid_column_of(near)[r] as usize)))
        .collect();
    let p3: Vec<usize> = f2.iter().map(|&r| cat.rid_column_of(far)[r] as usize).collect();
    let f = build_sip_filters(p2, 4, z).map_err(|e| e.to_string())?;
    ensure!(
        f.zone_bits.to_bools() == [false, true] && f.row_bits.to_bools() == [false, false, true, false],
        "P2 filter {:?}",
        f
    );
    let f = build_sip_filters(p3, 4, z).map_err(|e| e.to_string())?;
    ensure!(
        f.zone_bits.to_bools() == [false, true] && f.row_bits.to_bools() == [false, false, false, true],
        "P3 filter {:?}",
        f
    );

    let base = baseline(&cat, TWO_HOP_QUERY);
    let plan_a = rewrite_predefined(&base, &cat, AblationFlags::FULL);
    let (result, stats) = execute(&plan_a, &cat, z).map_err(|e| e.to_string())?;
    let want: Vec<Value> = [
        Value::Int64(202),
        Value::str("Karim"),
        Value::Int64(202),
        Value::Int64(303),
        Value::Int64(2020),
        Value::Int64(303),
        Value::str("Carmen"),
        Value::Int64(303),
        Value::Int64(404),
        Value::Int64(2019),
        Value::Int64(404),
        Value::str("Zhang"),
    ]
    .into();
    ensure!(result.rows() == vec![want], "result {:?}", result.rows());
    for alias in ["P2", "P3"] {
        let s = stats.scan(alias).ok_or("missing scan")?;
        ensure!((s.zones_visited, s.tuples_emitted) == (1, 1), "{alias} counters {s:?}");
    }

    let shape = |plan: &LogicalPlan, cat: &Catalog, want: &[&str]| -> Result<(), String> {
        let got = explained_kinds(plan, cat);
        ensure!(got == want, "plan shape {got:?}, want {want:?}\n{}", explain(plan, cat));
        Ok(())
    };
    shape(
        &plan_a,
        &cat,
        &["Project", "SJoin", "HashJoin", "SJoin", "HashJoin", "Scan", "Scan", "ScanSJ", "Scan", "ScanSJ"],
    )?;
    cat.build_rid_index(near).map_err(|e| e.to_string())?;
    let plan_b = rewrite_predefined(&baseline(&cat, TWO_HOP_QUERY), &cat, AblationFlags::FULL);
    shape(
        &plan_b,
        &cat,
        &["Project", "SJoin", "SJoinIdxR", "SJoin", "SJoinIdxR", "Scan", "ScanSJ", "ScanSJ", "ScanSJ", "ScanSJ"],
    )?;
    cat.build_extended_rid_index(near, far).map_err(|e| e.to_string())?;
    let plan_c = rewrite_predefined(&baseline(&cat, TWO_HOP_NAMES_QUERY), &cat, AblationFlags::FULL);
    shape(&plan_c, &cat, &["Project", "SJoinIdxM", "SJoinIdxM", "Scan", "ScanSJ", "ScanSJ"])?;
    for plan in [&plan_b, &plan_c] {
        let (r, _) = execute(plan, &cat, z).map_err(|e| e.to_string())?;
        ensure!(r.len() == 1, "expected one row, got {}", r.len());
    }
    Ok("RID columns, bitmasks, result tuple and three plan shapes match".into())
}

/// Criteria 2, 3 and 4 share one pass over the corpus.
struct CorpusReport {
    plans: usize,
    executions: usize,
    merged_plans: usize,
    oracle: Result<(), String>,
    sip: Result<(), String>,
    monotone: Result<(), String>,
}

fn first_err(slot: &mut Result<(), String>, msg: impl FnOnce() -> String) {
    if slot.is_ok() {
        *slot = Err(msg());
    }
}

fn run_corpus() -> CorpusReport {
    let mut rep = CorpusReport {
        plans: 0,
        executions: 0,
        merged_plans: 0,
        oracle: Ok(()),
        sip: Ok(()),
        monotone: Ok(()),
    };
    let configs = [AblationFlags::FULL, AblationFlags::NO_JM, AblationFlags::NO_JM_RSJ];
    for seed in 0..CORPUS_SEEDS {
        let db = random_database(seed);
        let cat = &db.catalog;
        for sql in random_queries(&db, QUERIES_PER_DB) {
            let ctx = |what: &str| format!("seed {seed}, {sql}: {what}");
            let q = match parse_query(&sql, cat) {
                Ok(q) => q,
                Err(e) => {
                    first_err(&mut rep.oracle, || ctx(&e.to_string()));
                    continue;
                }
            };
            let mut oracle = Oracle::new(cat, &q);
            let want = oracle.result();
            let plans = match enumerate_plans(&q, usize::MAX) {
                Ok(p) => p,
                Err(e) => {
                    first_err(&mut rep.oracle, || ctx(&e.to_string()));
                    continue;
                }
            };
            for (pid, plan) in plans.iter().enumerate() {
                rep.plans += 1;
                let vanilla = rewrite_predefined(plan, cat, AblationFlags::VANILLA);
                let Ok((res, base_stats)) = execute(&vanilla, cat, zones(2)) else {
                    first_err(&mut rep.oracle, || ctx(&format!("plan {pid} vanilla failed")));
                    continue;
                };
                rep.executions += 1;
                if res.sorted_rows() != want {
                    first_err(&mut rep.oracle, || ctx(&format!("plan {pid} vanilla result differs from oracle")));
                }
                for flags in configs {
                    let rewritten = rewrite_predefined(plan, cat, flags);
                    let merged = rewritten.root.joins().iter().any(|j| matches!(j.variant, JoinVariant::SJoinIdxM { .. }));
                    if merged {
                        rep.merged_plans += 1;
                        if rewritten.scan_count() >= vanilla.scan_count() {
                            first_err(&mut rep.monotone, || ctx(&format!("plan {pid} {flags}: merging kept all scans")));
                        }
                    }
                    for z in SJ_ZONE_SIZES {
                        let Ok((res, stats)) = execute(&rewritten, cat, zones(z)) else {
                            first_err(&mut rep.oracle, || ctx(&format!("plan {pid} {flags} zone {z} failed")));
                            continue;
                        };
                        rep.executions += 1;
                        if res.sorted_rows() != want {
                            first_err(&mut rep.oracle, || {
                                ctx(&format!("plan {pid} {flags} zone {z} result differs from oracle"))
                            });
                        }
                        if let Err(e) = oracle.check_sip(&rewritten, &stats, z) {
                            first_err(&mut rep.sip, || ctx(&format!("plan {pid} {flags} zone {z}: {e}")));
                        }
                        // The vanilla run used zone size 2; compare at the same granularity.
                        if z == 2 && stats.tuples_materialized() > base_stats.tuples_materialized() {
                            first_err(&mut rep.monotone, || {
                                ctx(&format!(
                                    "plan {pid} {flags}: {} tuples vs {} vanilla",
                                    stats.tuples_materialized(),
                                    base_stats.tuples_materialized()
                                ))
                            });
                        }
                    }
                }
            }
        }
    }
    rep
}

fn criterion_5() -> Outcome {
    let (mut plain, mut extended) = (0, 0);
    for seed in 0..CORPUS_SEEDS {
        let cat = random_database(seed).catalog;
        for ix in cat.rid_indices() {
            plain += 1;
            let pj = cat.join(ix.join);
            let (f, p) = (cat.table(pj.from_table), cat.table(pj.to_table));
            let off = ix.offsets();
            ensure!(off.len() == p.row_count() + 1 && off[0] == 0, "seed {seed}: offsets bounds");
            ensure!(off.windows(2).all(|w| w[0] <= w[1]), "seed {seed}: offsets not monotone");
            ensure!(*off.last().unwrap() == f.row_count(), "seed {seed}: offsets end");
            let mut flat = ix.values().to_vec();
            flat.sort_unstable();
            ensure!(flat == (0..f.row_count()).collect::<Vec<_>>(), "seed {seed}: values not a permutation");
            for pr in 0..p.row_count() {
                let want: Vec<usize> = (0..f.row_count())
                    .filter(|&fr| pj.from_cols.iter().zip(&pj.to_cols).all(|(&a, &b)| f.value(a, fr) == p.value(b, pr)))
                    .collect();
                ensure!(ix.neighbors(pr).unwrap() == want, "seed {seed}: neighbors of {pr}");
            }
        }
        for ix in cat.extended_rid_indices() {
            extended += 1;
            let (near, far) = (cat.join(ix.join_near), cat.join(ix.join_far));
            let (f, p1, p2) = (cat.table(near.from_table), cat.table(near.to_table), cat.table(far.to_table));
            let off = ix.offsets();
            ensure!(off.len() == p1.row_count() + 1 && off[0] == 0, "seed {seed}: extended offsets bounds");
            ensure!(off.windows(2).all(|w| w[0] <= w[1]), "seed {seed}: extended offsets not monotone");
            let mut flat: Vec<usize> = ix.entries().iter().map(|e| e.0).collect();
            flat.sort_unstable();
            ensure!(flat == (0..f.row_count()).collect::<Vec<_>>(), "seed {seed}: extended F RIDs not a permutation");
            for pr in 0..p1.row_count() {
                let want: Vec<(usize, usize)> = (0..f.row_count())
                    .filter(|&fr| near.from_cols.iter().zip(&near.to_cols).all(|(&a, &b)| f.value(a, fr) == p1.value(b, pr)))
                    .map(|fr| {
                        let target = (0..p2.row_count())
                            .find(|&r| far.from_cols.iter().zip(&far.to_cols).all(|(&a, &b)| f.value(a, fr) == p2.value(b, r)))
                            .expect("foreign key resolves");
                        (fr, target)
                    })
                    .collect();
                ensure!(ix.extended_neighbors(pr).unwrap() == want, "seed {seed}: extended neighbors of {pr}");
            }
        }
    }
    ensure!(plain > 0 && extended > 0, "corpus built no indices");
    Ok(format!("{plain} RID indices and {extended} extended indices"))
}

fn social() -> Catalog {
    let mut cat = generate_social(&SocialDbConfig {
        n_person: 10_000,
        avg_degree: 50.0,
        seed: 42,
        ..SocialDbConfig::default()
    });
    predefine_social(&mut cat).expect("social schema");
    cat
}

fn pair(rows: &[MicroRow], i: usize) -> (&MicroRow, &MicroRow) {
    let (v, p) = (&rows[2 * i], &rows[2 * i + 1]);
    assert_eq!((v.mode, p.mode), ("vanilla", "predefined"));
    (v, p)
}

fn criterion_6(cat: &Catalog) -> Outcome {
    let spec = MicroSpec::new(MicroKind::P);
    let rows = run_micro(cat, &spec, zones(BENCH_ZONE_SIZE), Timing::default()).map_err(|e| e.to_string())?;
    let sels = &spec.swept_selectivities;
    let mut detail = Vec::new();
    // Selectivities sorted descending so the counter must not grow along the walk.
    let mut order: Vec<usize> = (0..sels.len()).collect();
    order.sort_by(|&a, &b| sels[b].total_cmp(&sels[a]));
    let mut prev = u64::MAX;
    for &i in &order {
        let (v, p) = pair(&rows, i);
        ensure!(
            p.knows_tuples_materialized <= prev,
            "knows counter grows to {} at selectivity {}",
            p.knows_tuples_materialized,
            sels[i]
        );
        prev = p.knows_tuples_materialized;
        if sels[i] == 0.001 {
            ensure!(
                p.knows_tuples_materialized * 10 <= v.knows_tuples_materialized,
                "at 0.001 knows {} vs vanilla {}",
                p.knows_tuples_materialized,
                v.knows_tuples_materialized
            );
        }
        if sels[i] <= 0.001 {
            ensure!(
                p.wall_ms <= 0.7 * v.wall_ms,
                "at {} predefined {:.2} ms vs vanilla {:.2} ms",
                sels[i],
                p.wall_ms,
                v.wall_ms
            );
        }
        detail.push(format!("{}: {:.2}x", sels[i], p.wall_ms / v.wall_ms.max(1e-9)));
    }
    Ok(format!("time ratios {}", detail.join(", ")))
}

fn criterion_7(cat: &Catalog) -> Outcome {
    let spec = MicroSpec::new(MicroKind::K);
    let z = zones(BENCH_ZONE_SIZE);
    let rows = run_micro(cat, &spec, z, Timing::default()).map_err(|e| e.to_string())?;
    let person = cat.table(cat.table_id("Person").unwrap());
    let slack = (BENCH_ZONE_SIZE * person.zone_count(z)) as u64;
    let mut detail = Vec::new();
    for (i, sel) in spec.swept_selectivities.iter().enumerate() {
        let (v, p) = pair(&rows, i);
        ensure!(
            p.total_tuples_materialized <= v.total_tuples_materialized + slack,
            "at {sel} predefined {} tuples vs vanilla {} (slack {slack})",
            p.total_tuples_materialized,
            v.total_tuples_materialized
        );
        ensure!(
            p.wall_ms <= 1.25 * v.wall_ms,
            "at {sel} predefined {:.2} ms vs vanilla {:.2} ms",
            p.wall_ms,
            v.wall_ms
        );
        detail.push(format!("{sel}: {:.2}x", p.wall_ms / v.wall_ms.max(1e-9)));
    }
    Ok(format!("time ratios {}", detail.join(", ")))
}

fn criterion_8(cat: &Catalog) -> Outcome {
    let rows = run_ablation(cat, &ABLATION_SUITE, zones(BENCH_ZONE_SIZE), Timing::ONCE).map_err(|e| e.to_string())?;
    let order = ["GR-FULL", "GR-JM", "GR-JM-RSJ", "vanilla"];
    let mut strict = [0usize; 3];
    for (name, _) in ABLATION_SUITE {
        let t: Vec<u64> = order
            .iter()
            .map(|c| {
                rows.iter()
                    .find(|r| r.query == name && r.config == *c)
                    .map(|r| r.tuples_materialized)
                    .expect("every preset ran")
            })
            .collect();
        for step in 0..3 {
            ensure!(t[step] <= t[step + 1], "{name}: {} {} > {} {}", order[step], t[step], order[step + 1], t[step + 1]);
            if t[step] < t[step + 1] {
                strict[step] += 1;
            }
        }
    }
    ensure!(strict.iter().all(|&s| s > 0), "a step never improves: {strict:?}");
    Ok(format!("strict improvements per step {strict:?}"))
}

fn criterion_9() -> Outcome {
    let mut cat = generate_social(&SocialDbConfig {
        n_person: 2000,
        avg_degree: 20.0,
        seed: 42,
        ..SocialDbConfig::default()
    });
    predefine_social(&mut cat).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for (name, sql) in SPECTRUM_QUERIES {
        let r = run_spectrum(&cat, name, sql, usize::MAX, zones(BENCH_ZONE_SIZE), Timing::ONCE, None)
            .map_err(|e| e.to_string())?;
        let (base, rewritten) = r.good_plans();
        ensure!(rewritten >= base, "{name}: {rewritten} rewritten vs {base} baseline plans within bound");
        detail.push(format!("{name} {rewritten}/{base}"));
    }
    Ok(format!("good plans rewritten/baseline: {}", detail.join(", ")))
}

fn report(n: usize, name: &str, start: Instant, outcome: std::thread::Result<Outcome>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let (ok, msg) = match outcome {
        Ok(Ok(m)) => (true, m),
        Ok(Err(m)) => (false, m),
        Err(p) => (
            false,
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()),
        ),
    };
    println!("criterion {n} {name}: {} ({secs:.1}s) {msg}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn guarded(f: impl FnOnce() -> Outcome) -> std::thread::Result<Outcome> {
    catch_unwind(AssertUnwindSafe(f))
}

fn main() -> ExitCode {
    let mut all = true;
    let t = Instant::now();
    all &= report(1, "running-example fixtures", t, guarded(criterion_1));

    let t = Instant::now();
    let corpus = catch_unwind(run_corpus);
    let elapsed = t;
    match corpus {
        Ok(rep) => {
            let summary = format!("{} plans, {} executions", rep.plans, rep.executions);
            all &= report(2, "oracle equivalence", elapsed, Ok(rep.oracle.map(|_| summary.clone())));
            all &= report(3, "semijoin and zone exactness", elapsed, Ok(rep.sip.map(|_| summary.clone())));
            let merged = rep.merged_plans;
            all &= report(
                4,
                "monotone scan reduction",
                elapsed,
                Ok(rep.monotone.and_then(|_| {
                    if merged == 0 {
                        Err("no plan in the corpus merged joins".into())
                    } else {
                        Ok(format!("{merged} merged plans"))
                    }
                })),
            );
        }
        Err(p) => {
            for (n, name) in [(2, "oracle equivalence"), (3, "semijoin and zone exactness"), (4, "monotone scan reduction")] {
                let msg = p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into());
                all &= report(n, name, elapsed, Ok(Err(msg)));
            }
        }
    }

    let t = Instant::now();
    all &= report(5, "CSR invariants", t, guarded(criterion_5));

    let t = Instant::now();
    let cat = social();
    all &= report(6, "MICRO-P trend", t, guarded(|| criterion_6(&cat)));
    let t = Instant::now();
    all &= report(7, "MICRO-K neutrality", t, guarded(|| criterion_7(&cat)));
    let t = Instant::now();
    all &= report(8, "ablation ordering", t, guarded(|| criterion_8(&cat)));
    let t = Instant::now();
    all &= report(9, "spectrum robustness", t, guarded(criterion_9));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
