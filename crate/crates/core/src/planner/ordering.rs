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

//! Join-order search: the cost-based baseline and exhaustive enumeration.

use std::collections::HashMap;

use super::cardinality::{bits, CardinalitySource};
use super::{JoinKey, JoinNode, JoinVariant, LogicalPlan, PlanNode, ScanNode, Slot};
use crate::error::{Error, Result};
use crate::sqlfront::Query;

/// Largest query the dynamic program accepts.
pub const MAX_DP_RELATIONS: usize = 16;

/// Shape of a join tree over relation indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JoinTree {
    Leaf(usize),
    Join { build: Box<JoinTree>, probe: Box<JoinTree> },
}

impl JoinTree {
    pub fn join(build: JoinTree, probe: JoinTree) -> Self {
        JoinTree::Join {
            build: Box::new(build),
            probe: Box::new(probe),
        }
    }

    pub fn rels(&self) -> u64 {
        match self {
            JoinTree::Leaf(r) => 1 << r,
            JoinTree::Join { build, probe } => build.rels() | probe.rels(),
        }
    }
}

fn check_query(query: &Query) -> Result<()> {
    if !query.is_connected(query.all_rels()) {
        return Err(Error::DisconnectedJoinGraph);
    }
    if query.relations.len() > MAX_DP_RELATIONS {
        return Err(Error::UnsupportedFeature(format!(
            "join ordering over more than {MAX_DP_RELATIONS} relations"
        )));
    }
    Ok(())
}

/// Proper non-empty submasks of `mask` in increasing order.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut s = 0u64;
    std::iter::from_fn(move || {
        s = (s.wrapping_sub(mask)) & mask;
        (s != 0 && s != mask).then_some(s)
    })
}

/// Picks the join order minimizing the sum of intermediate result sizes.
///
/// Only connected subsets are joined, so no plan contains a cross product.
/// Bushy trees are allowed. The smaller input of every join is its build side.
pub fn plan_baseline(query: &Query, cards: &mut CardinalitySource<'_>) -> Result<LogicalPlan> {
    check_query(query)?;
    let all = query.all_rels();
    let mut best: HashMap<u64, (f64, JoinTree)> = HashMap::new();
    for r in bits(all) {
        best.insert(1 << r, (0.0, JoinTree::Leaf(r)));
    }
    for mask in 1..=all {
        if mask.count_ones() < 2 || mask & !all != 0 || !query.is_connected(mask) {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let mut chosen: Option<(f64, u64, u64)> = None;
        for s1 in submasks(mask).filter(|s| s & low != 0) {
            let s2 = mask ^ s1;
            let (Some(a), Some(b)) = (best.get(&s1), best.get(&s2)) else {
                continue;
            };
            if !query.connects(s1, s2) {
                continue;
            }
            let cost = a.0 + b.0;
            if chosen.is_none_or(|(c, _, _)| cost < c) {
                chosen = Some((cost, s1, s2));
            }
        }
        let Some((cost, s1, s2)) = chosen else {
            continue;
        };
        let (c1, c2) = (cards.cardinality(s1), cards.cardinality(s2));
        let (b, p) = if c2 < c1 { (s2, s1) } else { (s1, s2) };
        let tree = JoinTree::join(best[&b].1.clone(), best[&p].1.clone());
        best.insert(mask, (cost + cards.cardinality(mask), tree));
    }
    let tree = best
        .remove(&all)
        .map(|(_, t)| t)
        .ok_or_else(|| Error::Internal("no join order for a connected query".into()))?;
    Ok(plan_from_tree(query, &tree))
}

/// All join trees without cross products, each ordered split of every
/// subset taken with both orientations, truncated to the first `cap` in
/// generation order.
pub fn enumerate_plans(query: &Query, cap: usize) -> Result<Vec<LogicalPlan>> {
    check_query(query)?;
    let mut memo: HashMap<u64, Vec<JoinTree>> = HashMap::new();
    let trees = enumerate_trees(query, query.all_rels(), cap, &mut memo);
    Ok(trees.iter().map(|t| plan_from_tree(query, t)).collect())
}

fn enumerate_trees(query: &Query, mask: u64, cap: usize, memo: &mut HashMap<u64, Vec<JoinTree>>) -> Vec<JoinTree> {
    if let Some(t) = memo.get(&mask) {
        return t.clone();
    }
    let out = if mask.count_ones() == 1 {
        vec![JoinTree::Leaf(mask.trailing_zeros() as usize)]
    } else {
        let mut out = Vec::new();
        for s1 in submasks(mask) {
            let s2 = mask ^ s1;
            if !query.is_connected(s1) || !query.is_connected(s2) || !query.connects(s1, s2) {
                continue;
            }
            let builds = enumerate_trees(query, s1, cap, memo);
            let probes = enumerate_trees(query, s2, cap, memo);
            'outer: for b in &builds {
                for p in &probes {
                    if out.len() >= cap {
                        break 'outer;
                    }
                    out.push(JoinTree::join(b.clone(), p.clone()));
                }
            }
            if out.len() >= cap {
                break;
            }
        }
        out
    };
    memo.insert(mask, out.clone());
    out
}

/// Turns a join tree into a hash-join plan with filters pushed into scans.
pub fn plan_from_tree(query: &Query, tree: &JoinTree) -> LogicalPlan {
    fn build(query: &Query, tree: &JoinTree) -> PlanNode {
        match tree {
            JoinTree::Leaf(r) => PlanNode::Scan(ScanNode {
                rel: *r,
                table: query.relations[*r].table,
                filters: query.filters_of(*r).cloned().collect(),
                semijoin: false,
                fields: Vec::new(),
            }),
            JoinTree::Join { build: b, probe: p } => {
                let (bm, pm) = (b.rels(), p.rels());
                let keys = query
                    .joins
                    .iter()
                    .filter_map(|j| {
                        let (l, r) = (j.left, j.right);
                        if bm >> l.rel & 1 == 1 && pm >> r.rel & 1 == 1 {
                            Some(JoinKey {
                                build: Slot::column(l),
                                probe: Slot::column(r),
                            })
                        } else if bm >> r.rel & 1 == 1 && pm >> l.rel & 1 == 1 {
                            Some(JoinKey {
                                build: Slot::column(r),
                                probe: Slot::column(l),
                            })
                        } else {
                            None
                        }
                    })
                    .collect();
                PlanNode::Join(JoinNode {
                    variant: JoinVariant::Hash,
                    build: Box::new(build(query, b)),
                    probe: Box::new(build(query, p)),
                    keys,
                    rid_join: None,
                    output: Vec::new(),
                })
            }
        }
    }
    let mut plan = LogicalPlan {
        query: query.clone(),
        root: LogicalPlan::output_node(query, build(query, tree)),
    };
    plan.finalize();
    plan
}
