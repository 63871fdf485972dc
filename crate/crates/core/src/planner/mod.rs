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

//! Logical plans, baseline join ordering, plan enumeration and the
//! predefined-join rewrite.

mod cardinality;
mod explain;
mod ordering;
mod rewrite;

use std::collections::BTreeSet;

use serde::Serialize;

pub use cardinality::{exact_cardinality, CardMode, CardinalitySource};
pub use explain::explain;
pub use ordering::{enumerate_plans, plan_baseline, plan_from_tree, JoinTree};
pub use rewrite::{rewrite_predefined, AblationFlags};

use crate::ridindex::{ExtendedRidIndexId, RidIndexId};
use crate::ridmat::JoinId;
use crate::sqlfront::{ColRef, Filter, Output, Query};
use crate::storage::TableId;

/// What an operator carries for one relation instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Field {
    /// A stored column: a user column or a materialized RID column.
    Column(usize),
    /// The virtual RID (row position); never read from storage.
    Rid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub rel: usize,
    pub field: Field,
}

impl Slot {
    pub fn column(c: ColRef) -> Self {
        Slot {
            rel: c.rel,
            field: Field::Column(c.column),
        }
    }

    pub fn rid(rel: usize) -> Self {
        Slot { rel, field: Field::Rid }
    }
}

/// One equality of a join, oriented build side first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JoinKey {
    pub build: Slot,
    pub probe: Slot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OpKind {
    Scan,
    ScanSJ,
    HashJoin,
    SJoin,
    SJoinIdxR,
    SJoinIdxM,
    Project,
    Aggregate,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Scan => "Scan",
            OpKind::ScanSJ => "ScanSJ",
            OpKind::HashJoin => "HashJoin",
            OpKind::SJoin => "SJoin",
            OpKind::SJoinIdxR => "SJoinIdxR",
            OpKind::SJoinIdxM => "SJoinIdxM",
            OpKind::Project => "Project",
            OpKind::Aggregate => "Aggregate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanNode {
    pub rel: usize,
    pub table: TableId,
    pub filters: Vec<Filter>,
    /// A `ScanSJ`: consumes sip filters registered for `rel`.
    pub semijoin: bool,
    /// Fields emitted per row; filled in by [`LogicalPlan::finalize`].
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinVariant {
    Hash,
    /// Build side holds `F`; passes its materialized RIDs to `ScanSJ(target)`.
    SJoin { target: usize },
    /// Build side holds `P`; passes the `F` RIDs found in the index to `ScanSJ(target)`.
    SJoinIdxR { index: RidIndexId, target: usize },
    /// Joins `P1` directly to `P2` through an extended index; `merged` is never scanned.
    SJoinIdxM {
        index: ExtendedRidIndexId,
        merged: usize,
        target: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinNode {
    pub variant: JoinVariant,
    pub build: Box<PlanNode>,
    pub probe: Box<PlanNode>,
    /// `keys[0]` is the RID equality whenever `rid_join` is set.
    pub keys: Vec<JoinKey>,
    /// The predefined join evaluated through RIDs, if any.
    pub rid_join: Option<JoinId>,
    /// Slots passed to the parent; filled in by [`LogicalPlan::finalize`].
    pub output: Vec<Slot>,
}

impl JoinNode {
    pub fn kind(&self) -> OpKind {
        match self.variant {
            JoinVariant::Hash => OpKind::HashJoin,
            JoinVariant::SJoin { .. } => OpKind::SJoin,
            JoinVariant::SJoinIdxR { .. } => OpKind::SJoinIdxR,
            JoinVariant::SJoinIdxM { .. } => OpKind::SJoinIdxM,
        }
    }

    /// Relation whose scan receives this join's sip filter.
    pub fn sip_target(&self) -> Option<usize> {
        match self.variant {
            JoinVariant::Hash => None,
            JoinVariant::SJoin { target }
            | JoinVariant::SJoinIdxR { target, .. }
            | JoinVariant::SJoinIdxM { target, .. } => Some(target),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AggKind {
    Count,
    Min(ColRef),
    Max(ColRef),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanNode {
    Scan(ScanNode),
    Join(JoinNode),
    Project { input: Box<PlanNode>, columns: Vec<ColRef> },
    Aggregate { input: Box<PlanNode>, kind: AggKind },
}

impl PlanNode {
    pub fn kind(&self) -> OpKind {
        match self {
            PlanNode::Scan(s) if s.semijoin => OpKind::ScanSJ,
            PlanNode::Scan(_) => OpKind::Scan,
            PlanNode::Join(j) => j.kind(),
            PlanNode::Project { .. } => OpKind::Project,
            PlanNode::Aggregate { .. } => OpKind::Aggregate,
        }
    }

    pub fn children(&self) -> Vec<&PlanNode> {
        match self {
            PlanNode::Scan(_) => vec![],
            PlanNode::Join(j) => vec![&j.build, &j.probe],
            PlanNode::Project { input, .. } | PlanNode::Aggregate { input, .. } => vec![input],
        }
    }

    /// Bit set of relations scanned in this subtree.
    pub fn rels(&self) -> u64 {
        match self {
            PlanNode::Scan(s) => 1 << s.rel,
            PlanNode::Join(j) => j.build.rels() | j.probe.rels(),
            PlanNode::Project { input, .. } | PlanNode::Aggregate { input, .. } => input.rels(),
        }
    }

    /// Nodes in pre-order (node, then build, then probe).
    pub fn preorder(&self) -> Vec<&PlanNode> {
        let mut out = Vec::new();
        fn walk<'a>(n: &'a PlanNode, out: &mut Vec<&'a PlanNode>) {
            out.push(n);
            for c in n.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn scans(&self) -> Vec<&ScanNode> {
        self.preorder()
            .into_iter()
            .filter_map(|n| match n {
                PlanNode::Scan(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    pub fn joins(&self) -> Vec<&JoinNode> {
        self.preorder()
            .into_iter()
            .filter_map(|n| match n {
                PlanNode::Join(j) => Some(j),
                _ => None,
            })
            .collect()
    }

    fn finalize(&mut self, needed: &BTreeSet<Slot>) {
        match self {
            PlanNode::Scan(s) => {
                s.fields = needed.iter().filter(|sl| sl.rel == s.rel).map(|sl| sl.field).collect();
            }
            PlanNode::Join(j) => {
                let mine = j.build.rels() | j.probe.rels();
                let mut below = needed.clone();
                for k in &j.keys {
                    below.insert(k.build);
                    below.insert(k.probe);
                }
                let (b, p) = (j.build.rels(), j.probe.rels());
                let build_needed = below.iter().filter(|s| b >> s.rel & 1 == 1).copied().collect();
                let probe_needed = below.iter().filter(|s| p >> s.rel & 1 == 1).copied().collect();
                j.build.finalize(&build_needed);
                j.probe.finalize(&probe_needed);
                let layout: Vec<Slot> = j.build.output_slots().into_iter().chain(j.probe.output_slots()).collect();
                j.output = layout
                    .into_iter()
                    .filter(|s| mine >> s.rel & 1 == 1 && needed.contains(s))
                    .collect();
            }
            PlanNode::Project { input, columns } => {
                let needed = columns.iter().map(|&c| Slot::column(c)).collect();
                input.finalize(&needed);
            }
            PlanNode::Aggregate { input, kind } => {
                let needed = match kind {
                    AggKind::Count => BTreeSet::new(),
                    AggKind::Min(c) | AggKind::Max(c) => [Slot::column(*c)].into_iter().collect(),
                };
                input.finalize(&needed);
            }
        }
    }

    /// Slots in the order this node emits them.
    pub fn output_slots(&self) -> Vec<Slot> {
        match self {
            PlanNode::Scan(s) => s.fields.iter().map(|&field| Slot { rel: s.rel, field }).collect(),
            PlanNode::Join(j) => j.output.clone(),
            PlanNode::Project { columns, .. } => columns.iter().map(|&c| Slot::column(c)).collect(),
            PlanNode::Aggregate { .. } => vec![],
        }
    }
}

/// A plan tree together with the query it answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalPlan {
    pub query: Query,
    pub root: PlanNode,
}

impl LogicalPlan {
    /// Recomputes the fields every operator must carry.
    pub fn finalize(&mut self) {
        self.root.finalize(&BTreeSet::new());
    }

    pub fn scan_count(&self) -> usize {
        self.root.scans().len()
    }

    /// Operator kinds in pre-order.
    pub fn kinds(&self) -> Vec<OpKind> {
        self.root.preorder().iter().map(|n| n.kind()).collect()
    }

    pub(crate) fn output_node(query: &Query, tree: PlanNode) -> PlanNode {
        let input = Box::new(tree);
        match &query.output {
            Output::Columns(cols) => PlanNode::Project {
                input,
                columns: cols.clone(),
            },
            Output::Count => PlanNode::Aggregate {
                input,
                kind: AggKind::Count,
            },
            Output::Min(c) => PlanNode::Aggregate {
                input,
                kind: AggKind::Min(*c),
            },
            Output::Max(c) => PlanNode::Aggregate {
                input,
                kind: AggKind::Max(*c),
            },
        }
    }
}
