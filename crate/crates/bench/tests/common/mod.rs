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

//! Reference evaluators that share no code with the engine's join,
//! bitmask or index paths: nested loops over values only.

use std::collections::{BTreeSet, HashMap};

use predjoin_core::planner::{JoinVariant, LogicalPlan, PlanNode};
use predjoin_core::sqlfront::{Output, Query};
use predjoin_core::{Catalog, ExecStats, Value};

/// Memoized brute-force join results per subset of relations.
pub struct Oracle<'a> {
    catalog: &'a Catalog,
    query: &'a Query,
    memo: HashMap<u64, Vec<Vec<usize>>>,
}

impl<'a> Oracle<'a> {
    pub fn new(catalog: &'a Catalog, query: &'a Query) -> Self {
        Oracle {
            catalog,
            query,
            memo: HashMap::new(),
        }
    }

    fn value(&self, rel: usize, col: usize, row: usize) -> Value {
        self.catalog.table(self.query.relations[rel].table).value(col, row)
    }

    fn passes_filters(&self, rel: usize, row: usize) -> bool {
        self.query
            .filters_of(rel)
            .all(|f| f.matches(&self.value(rel, f.column.column, row)))
    }

    /// Every combination of rows (indexed by relation; unused slots are
    /// `usize::MAX`) satisfying the filters and join predicates inside `mask`.
    pub fn tuples(&mut self, mask: u64) -> Vec<Vec<usize>> {
        if let Some(t) = self.memo.get(&mask) {
            return t.clone();
        }
        let n = self.query.relations.len();
        // Visit relations so that each one after the first touches an earlier one when possible.
        let mut order: Vec<usize> = Vec::new();
        let mut left: Vec<usize> = (0..n).filter(|r| mask >> r & 1 == 1).collect();
        while !left.is_empty() {
            let pos = left
                .iter()
                .position(|&r| {
                    self.query
                        .joins
                        .iter()
                        .any(|j| j.touches(r) && order.contains(&j.oriented(r).1.rel))
                })
                .unwrap_or(0);
            order.push(left.remove(pos));
        }
        let mut out = Vec::new();
        let mut cur = vec![usize::MAX; n];
        self.extend(&order, 0, &mut cur, &mut out);
        self.memo.insert(mask, out.clone());
        out
    }

    fn extend(&self, order: &[usize], depth: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if depth == order.len() {
            out.push(cur.clone());
            return;
        }
        let rel = order[depth];
        let rows = self.catalog.table(self.query.relations[rel].table).row_count();
        for row in 0..rows {
            if !self.passes_filters(rel, row) {
                continue;
            }
            cur[rel] = row;
            let ok = self.query.joins.iter().all(|j| {
                if !j.touches(rel) {
                    return true;
                }
                let (mine, other) = j.oriented(rel);
                if cur[other.rel] == usize::MAX || !order[..=depth].contains(&other.rel) {
                    return true;
                }
                self.value(rel, mine.column, row) == self.value(other.rel, other.column, cur[other.rel])
            });
            if ok {
                self.extend(order, depth + 1, cur, out);
            }
        }
        cur[rel] = usize::MAX;
    }

    /// The query result as sorted rows.
    pub fn result(&mut self) -> Vec<Vec<Value>> {
        let tuples = self.tuples(self.query.all_rels());
        let mut rows: Vec<Vec<Value>> = match &self.query.output {
            Output::Columns(cols) => tuples
                .iter()
                .map(|t| cols.iter().map(|c| self.value(c.rel, c.column, t[c.rel])).collect())
                .collect(),
            Output::Count => vec![vec![Value::Int64(tuples.len() as i64)]],
            Output::Min(c) | Output::Max(c) => {
                let vals = tuples.iter().map(|t| self.value(c.rel, c.column, t[c.rel]));
                let best = if matches!(self.query.output, Output::Min(_)) {
                    vals.min()
                } else {
                    vals.max()
                };
                best.into_iter().map(|v| vec![v]).collect()
            }
        };
        rows.sort();
        rows
    }

    /// Rows of `rel`'s table whose `cols` equal `values`.
    fn matching_rows(&self, rel: usize, cols: &[usize], values: &[Value]) -> Vec<usize> {
        let t = self.catalog.table(self.query.relations[rel].table);
        (0..t.row_count())
            .filter(|&r| cols.iter().zip(values).all(|(&c, v)| t.value(c, r) == *v))
            .collect()
    }

    fn row_values(&self, rel: usize, cols: &[usize], row: usize) -> Vec<Value> {
        cols.iter().map(|&c| self.value(rel, c, row)).collect()
    }

    /// Rows of the target relation that the join's semijoin admits, by value matching.
    fn semijoin_set(&mut self, node: &PlanNode) -> (usize, BTreeSet<usize>) {
        let PlanNode::Join(j) = node else { unreachable!() };
        let build = self.tuples(covered(&j.build));
        let mut set = BTreeSet::new();
        let target;
        match j.variant {
            JoinVariant::SJoin { target: p } => {
                target = p;
                let pj = self.catalog.join(j.rid_join.unwrap());
                let f = j.keys[0].build.rel;
                for b in &build {
                    let vals = self.row_values(f, &pj.from_cols, b[f]);
                    set.extend(self.matching_rows(p, &pj.to_cols, &vals));
                }
            }
            JoinVariant::SJoinIdxR { target: f, .. } => {
                target = f;
                let pj = self.catalog.join(j.rid_join.unwrap());
                let p = j.keys[0].build.rel;
                for b in &build {
                    let vals = self.row_values(p, &pj.to_cols, b[p]);
                    set.extend(self.matching_rows(f, &pj.from_cols, &vals));
                }
            }
            JoinVariant::SJoinIdxM { index, merged, target: p2 } => {
                target = p2;
                let ix = self.catalog.extended_rid_index(index);
                let (near, far) = (self.catalog.join(ix.join_near), self.catalog.join(ix.join_far));
                let p1 = j.keys[0].build.rel;
                for b in &build {
                    let vals = self.row_values(p1, &near.to_cols, b[p1]);
                    for fr in self.matching_rows(merged, &near.from_cols, &vals) {
                        let fv = self.row_values(merged, &far.from_cols, fr);
                        set.extend(self.matching_rows(p2, &far.to_cols, &fv));
                    }
                }
            }
            JoinVariant::Hash => unreachable!(),
        }
        (target, set)
    }

    /// Checks every `ScanSJ` against the reference semijoin sets; returns a
    /// description of the first mismatch.
    pub fn check_sip(&mut self, plan: &LogicalPlan, stats: &ExecStats, zone_size: usize) -> Result<(), String> {
        // Sets routed to each relation: intersected down each probe spine.
        let mut routed: HashMap<usize, Vec<BTreeSet<usize>>> = HashMap::new();
        let mut stack: Vec<(&PlanNode, Vec<usize>)> = vec![(&plan.root, vec![])];
        while let Some((node, pending)) = stack.pop() {
            match node {
                PlanNode::Scan(_) => {}
                PlanNode::Join(j) => {
                    stack.push((&j.build, vec![]));
                    let mut p = pending.clone();
                    if j.sip_target().is_some() {
                        let (target, set) = self.semijoin_set(node);
                        if spine_reaches(&j.probe, target) {
                            routed.entry(target).or_default().push(set);
                            p.push(target);
                        }
                    }
                    stack.push((&j.probe, p));
                }
                PlanNode::Project { input, .. } | PlanNode::Aggregate { input, .. } => stack.push((input, pending)),
            }
        }
        for s in plan.root.scans() {
            let alias = &plan.query.relations[s.rel].alias;
            let st = stats.scan(alias).ok_or(format!("no stats for {alias}"))?;
            if !s.semijoin {
                if routed.contains_key(&s.rel) {
                    return Err(format!("{alias} receives a filter but is not a ScanSJ"));
                }
                continue;
            }
            let sets = routed.get(&s.rel).ok_or(format!("ScanSJ {alias} receives no filter"))?;
            let combined: BTreeSet<usize> = sets[0]
                .iter()
                .copied()
                .filter(|r| sets[1..].iter().all(|o| o.contains(r)))
                .collect();
            let emitted = combined.iter().filter(|&&r| self.passes_filters(s.rel, r)).count() as u64;
            let zones = combined.iter().map(|r| r / zone_size).collect::<BTreeSet<_>>().len() as u64;
            if st.tuples_emitted != emitted || st.zones_visited != zones {
                return Err(format!(
                    "{alias}: emitted {} (want {emitted}), zones {} (want {zones})",
                    st.tuples_emitted, st.zones_visited
                ));
            }
        }
        Ok(())
    }
}

/// Relations joined below `node`, including merged ones that are never scanned.
fn covered(node: &PlanNode) -> u64 {
    match node {
        PlanNode::Scan(s) => 1 << s.rel,
        PlanNode::Join(j) => {
            let merged = match j.variant {
                JoinVariant::SJoinIdxM { merged, .. } => 1 << merged,
                _ => 0,
            };
            covered(&j.build) | covered(&j.probe) | merged
        }
        PlanNode::Project { input, .. } | PlanNode::Aggregate { input, .. } => covered(input),
    }
}

fn spine_reaches(node: &PlanNode, rel: usize) -> bool {
    match node {
        PlanNode::Scan(s) => s.rel == rel,
        PlanNode::Join(j) => spine_reaches(&j.probe, rel),
        _ => false,
    }
}
