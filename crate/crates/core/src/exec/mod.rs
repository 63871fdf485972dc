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

//! Vectorized execution of logical plans.

mod hash;
mod ops;
mod sip;

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

pub use hash::JoinTable;
pub use sip::{build_reverse_sip_filters, build_sip_filters, expand_merged_build, MergedBuild, SipFilter};

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::planner::{AggKind, LogicalPlan, PlanNode, Slot};
use crate::storage::{Catalog, DataType, Value, Vector, ZoneConfig};

/// A batch of rows; positions whose `sel` bit is clear are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataChunk {
    pub len: usize,
    pub columns: Vec<Vector>,
    pub sel: Bitmap,
}

/// Counters of one operator. Scans fill the first three, joins the next three.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OpStats {
    pub id: usize,
    pub op: String,
    /// Alias for scans, empty otherwise.
    pub label: String,
    pub zones_visited: u64,
    pub tuples_materialized: u64,
    pub tuples_emitted: u64,
    pub build_rows: u64,
    pub probe_rows: u64,
    pub output_rows: u64,
    /// Time spent in this operator including its children.
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExecStats {
    pub ops: Vec<OpStats>,
    pub result_rows: u64,
    pub wall_ms: f64,
}

impl ExecStats {
    /// Stats of the scan of `alias`.
    pub fn scan(&self, alias: &str) -> Option<&OpStats> {
        self.ops
            .iter()
            .find(|o| o.label == alias && (o.op == "Scan" || o.op == "ScanSJ"))
    }

    pub fn tuples_materialized(&self) -> u64 {
        self.ops.iter().map(|o| o.tuples_materialized).sum()
    }

    pub fn tuples_emitted(&self) -> u64 {
        self.ops.iter().map(|o| o.tuples_emitted).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

pub(crate) struct ExecContext {
    pub zones: ZoneConfig,
    /// Combined sip filter per relation of the query.
    pub sip: Vec<Option<SipFilter>>,
    pub stats: Vec<OpStats>,
}

impl ExecContext {
    fn register(&mut self, rel: usize, filter: SipFilter) {
        match &mut self.sip[rel] {
            Some(existing) => existing.intersect(&filter, self.zones),
            slot @ None => *slot = Some(filter),
        }
    }
}

/// Query output, column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultSet {
    pub names: Vec<String>,
    pub types: Vec<DataType>,
    pub columns: Vec<Vector>,
    len: usize,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn row(&self, i: usize) -> Vec<Value> {
        self.columns
            .iter()
            .zip(&self.types)
            .map(|(c, &t)| c.value(i, t))
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<Value>> {
        (0..self.len).map(|i| self.row(i)).collect()
    }

    /// Rows in sorted order, for multiset comparisons.
    pub fn sorted_rows(&self) -> Vec<Vec<Value>> {
        let mut rows = self.rows();
        rows.sort();
        rows
    }

    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        if header {
            w.write_record(&self.names).map_err(io)?;
        }
        for i in 0..self.len {
            w.write_record(self.row(i).iter().map(Value::to_string)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `plan` to completion.
pub fn execute(plan: &LogicalPlan, catalog: &Catalog, zones: ZoneConfig) -> Result<(ResultSet, ExecStats)> {
    let start = Instant::now();
    let mut stats = Vec::new();
    let mut root = ops::compile(plan, catalog, &plan.root, &mut stats)?;
    let mut ctx = ExecContext {
        zones,
        sip: vec![None; plan.query.relations.len()],
        stats,
    };
    let types: Vec<DataType> = match &plan.root {
        PlanNode::Aggregate { kind: AggKind::Count, .. } => vec![DataType::Int64],
        PlanNode::Aggregate {
            kind: AggKind::Min(c) | AggKind::Max(c),
            ..
        } => vec![ops::slot_type(plan, catalog, Slot::column(*c))],
        node => node
            .output_slots()
            .into_iter()
            .map(|s| ops::slot_type(plan, catalog, s))
            .collect(),
    };
    let mut columns: Vec<Vector> = types.iter().map(|&t| Vector::empty(t)).collect();
    let mut len = 0;
    while let Some(ch) = ops::pull(&mut *root, &mut ctx)? {
        let idx: Vec<usize> = ch.sel.iter_ones().collect();
        for (c, v) in columns.iter_mut().zip(&ch.columns) {
            if idx.len() == ch.len {
                c.append(v);
            } else {
                c.append(&v.gather(&idx));
            }
        }
        len += idx.len();
    }
    let result = ResultSet {
        names: plan.query.output_names(catalog),
        types,
        columns,
        len,
    };
    let stats = ExecStats {
        ops: ctx.stats,
        result_rows: len as u64,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((result, stats))
}
