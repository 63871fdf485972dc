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

//! Rewriting hash joins that evaluate predefined joins into RID-based operators.

use std::fmt;

use serde::Serialize;

use super::{Field, JoinKey, JoinNode, JoinVariant, LogicalPlan, PlanNode, Slot};
use crate::error::{Error, Result};
use crate::ridmat::PredefinedJoin;
use crate::sqlfront::{Output, Query};
use crate::storage::Catalog;

/// Which RID-based techniques the rewrite may use.
///
/// Each technique requires the previous one: join merging needs reverse
/// semi-join reduction, which needs RID materialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AblationFlags {
    rid_mat: bool,
    rsj: bool,
    jm: bool,
}

impl AblationFlags {
    pub const FULL: AblationFlags = AblationFlags {
        rid_mat: true,
        rsj: true,
        jm: true,
    };
    pub const NO_JM: AblationFlags = AblationFlags {
        rid_mat: true,
        rsj: true,
        jm: false,
    };
    pub const NO_JM_RSJ: AblationFlags = AblationFlags {
        rid_mat: true,
        rsj: false,
        jm: false,
    };
    pub const VANILLA: AblationFlags = AblationFlags {
        rid_mat: false,
        rsj: false,
        jm: false,
    };

    /// The presets in decreasing order of enabled techniques.
    pub const PRESETS: [AblationFlags; 4] = [Self::FULL, Self::NO_JM, Self::NO_JM_RSJ, Self::VANILLA];

    pub fn new(rid_mat: bool, rsj: bool, jm: bool) -> Result<Self> {
        if jm && !rsj {
            return Err(Error::InvalidFlags("join merging requires reverse semi-join reduction".into()));
        }
        if rsj && !rid_mat {
            return Err(Error::InvalidFlags(
                "reverse semi-join reduction requires RID materialization".into(),
            ));
        }
        Ok(AblationFlags { rid_mat, rsj, jm })
    }

    pub fn rid_mat(self) -> bool {
        self.rid_mat
    }

    pub fn rsj(self) -> bool {
        self.rsj
    }

    pub fn jm(self) -> bool {
        self.jm
    }

    pub fn name(self) -> &'static str {
        match (self.rid_mat, self.rsj, self.jm) {
            (true, true, true) => "GR-FULL",
            (true, true, false) => "GR-JM",
            (true, false, false) => "GR-JM-RSJ",
            _ => "vanilla",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::PRESETS.into_iter().find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

impl Default for AblationFlags {
    fn default() -> Self {
        Self::FULL
    }
}

impl fmt::Display for AblationFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Replaces hash joins over predefined joins with `SJoin`, `SJoinIdxR` and
/// `SJoinIdxM` as far as `flags` and the catalog's indices allow.
///
/// The tree shape is kept, except that join merging removes the scan of the
/// merged relation. Scans receiving sip filters become `ScanSJ`.
pub fn rewrite_predefined(plan: &LogicalPlan, catalog: &Catalog, flags: AblationFlags) -> LogicalPlan {
    let mut out = plan.clone();
    if flags.rid_mat {
        let rw = Rewriter {
            catalog,
            query: &plan.query,
            flags,
        };
        out.root = rw.rewrite(&plan.root);
        mark_semijoin(&mut out.root, &[]);
    }
    out.finalize();
    out
}

/// Flags the scans that receive sip filters. Filters travel down the probe
/// spine of the join producing them and never enter a nested build side.
fn mark_semijoin(node: &mut PlanNode, pending: &[usize]) {
    match node {
        PlanNode::Scan(s) => s.semijoin = pending.contains(&s.rel),
        PlanNode::Join(j) => {
            mark_semijoin(&mut j.build, &[]);
            let mut probe_targets = pending.to_vec();
            probe_targets.extend(j.sip_target());
            mark_semijoin(&mut j.probe, &probe_targets);
        }
        PlanNode::Project { input, .. } | PlanNode::Aggregate { input, .. } => mark_semijoin(input, pending),
    }
}

struct Rewriter<'a> {
    catalog: &'a Catalog,
    query: &'a Query,
    flags: AblationFlags,
}

impl Rewriter<'_> {
    fn rewrite(&self, node: &PlanNode) -> PlanNode {
        match node {
            PlanNode::Scan(_) => node.clone(),
            PlanNode::Project { input, columns } => PlanNode::Project {
                input: Box::new(self.rewrite(input)),
                columns: columns.clone(),
            },
            PlanNode::Aggregate { input, kind } => PlanNode::Aggregate {
                input: Box::new(self.rewrite(input)),
                kind: kind.clone(),
            },
            PlanNode::Join(j) => {
                let mut nj = JoinNode {
                    variant: j.variant,
                    build: Box::new(self.rewrite(&j.build)),
                    probe: Box::new(self.rewrite(&j.probe)),
                    keys: j.keys.clone(),
                    rid_join: j.rid_join,
                    output: Vec::new(),
                };
                if nj.variant == JoinVariant::Hash && nj.rid_join.is_none() {
                    self.apply_predefined(&mut nj);
                }
                if self.flags.jm {
                    if let Some(merged) = self.try_merge(&nj) {
                        return PlanNode::Join(merged);
                    }
                }
                PlanNode::Join(nj)
            }
        }
    }

    fn table_of(&self, rel: usize) -> crate::storage::TableId {
        self.query.relations[rel].table
    }

    /// Indices into `keys` covering `pj` from `f` to `p`, in column order.
    fn cover(&self, keys: &[JoinKey], pj: &PredefinedJoin, f: usize, p: usize) -> Option<Vec<usize>> {
        if self.table_of(f) != pj.from_table || self.table_of(p) != pj.to_table {
            return None;
        }
        let mut used = Vec::with_capacity(pj.from_cols.len());
        for (&fc, &pc) in pj.from_cols.iter().zip(&pj.to_cols) {
            let a = Slot {
                rel: f,
                field: Field::Column(fc),
            };
            let b = Slot {
                rel: p,
                field: Field::Column(pc),
            };
            let k = keys
                .iter()
                .enumerate()
                .position(|(i, k)| !used.contains(&i) && ((k.build, k.probe) == (a, b) || (k.build, k.probe) == (b, a)))?;
            used.push(k);
        }
        Some(used)
    }

    fn apply_predefined(&self, nj: &mut JoinNode) {
        let build_rels = nj.build.rels();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for k in &nj.keys {
            for pair in [(k.build.rel, k.probe.rel), (k.probe.rel, k.build.rel)] {
                if !pairs.contains(&pair) {
                    pairs.push(pair);
                }
            }
        }
        for pj in self.catalog.predefined_joins() {
            for &(f, p) in &pairs {
                let Some(used) = self.cover(&nj.keys, pj, f, p) else {
                    continue;
                };
                let rid_col = Slot {
                    rel: f,
                    field: Field::Column(pj.rid_column),
                };
                let (key, variant) = if build_rels >> f & 1 == 1 {
                    (
                        JoinKey {
                            build: rid_col,
                            probe: Slot::rid(p),
                        },
                        JoinVariant::SJoin { target: p },
                    )
                } else {
                    let variant = match self.catalog.rid_index_for(pj.id) {
                        Some(ix) if self.flags.rsj => JoinVariant::SJoinIdxR { index: ix.id, target: f },
                        _ => JoinVariant::Hash,
                    };
                    (
                        JoinKey {
                            build: Slot::rid(p),
                            probe: rid_col,
                        },
                        variant,
                    )
                };
                let residual = nj.keys.iter().enumerate().filter(|(i, _)| !used.contains(i)).map(|(_, k)| *k);
                nj.keys = std::iter::once(key).chain(residual).collect();
                nj.variant = variant;
                nj.rid_join = Some(pj.id);
                return;
            }
        }
    }

    /// Merges `outer` (an `SJoin` whose build side is a RID join against a
    /// bare scan of the connecting relation) into one `SJoinIdxM`.
    fn try_merge(&self, outer: &JoinNode) -> Option<JoinNode> {
        let JoinVariant::SJoin { target: p2 } = outer.variant else {
            return None;
        };
        let far = self.catalog.join(outer.rid_join?);
        let f = outer.keys[0].build.rel;
        let PlanNode::Join(inner) = &*outer.build else {
            return None;
        };
        if !matches!(inner.variant, JoinVariant::Hash | JoinVariant::SJoinIdxR { .. }) || inner.keys.len() != 1 {
            return None;
        }
        let near = self.catalog.join(inner.rid_join?);
        let PlanNode::Scan(fs) = &*inner.probe else {
            return None;
        };
        if fs.rel != f || !fs.filters.is_empty() {
            return None;
        }
        let key = inner.keys[0];
        let p1 = key.build.rel;
        if key.build != Slot::rid(p1)
            || key.probe
                != (Slot {
                    rel: f,
                    field: Field::Column(near.rid_column),
                })
        {
            return None;
        }
        if outer.keys[1..].iter().any(|k| k.build.rel == f || k.probe.rel == f) {
            return None;
        }
        let other_joins = self.query.joins.iter().any(|j| {
            if !j.touches(f) {
                return false;
            }
            let other = j.oriented(f).1.rel;
            other != p1 && other != p2
        });
        if other_joins || self.outputs_rel(f) {
            return None;
        }
        let index = self.catalog.extended_index_for(near.id, far.id)?;
        let keys = std::iter::once(JoinKey {
            build: Slot::rid(p1),
            probe: Slot::rid(p2),
        })
        .chain(outer.keys[1..].iter().copied())
        .collect();
        Some(JoinNode {
            variant: JoinVariant::SJoinIdxM {
                index: index.id,
                merged: f,
                target: p2,
            },
            build: inner.build.clone(),
            probe: outer.probe.clone(),
            keys,
            rid_join: None,
            output: Vec::new(),
        })
    }

    fn outputs_rel(&self, rel: usize) -> bool {
        match &self.query.output {
            Output::Columns(cols) => cols.iter().any(|c| c.rel == rel),
            Output::Count => false,
            Output::Min(c) | Output::Max(c) => c.rel == rel,
        }
    }
}
