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

//! Pull-based operators. Each `next` returns one chunk or `None` when exhausted.

use std::time::Instant;

use super::hash::JoinTable;
use super::sip::{build_reverse_sip_filters, build_sip_filters, expand_merged_build};
use super::{DataChunk, ExecContext, OpStats};
use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::planner::{AggKind, Field, JoinNode, JoinVariant, LogicalPlan, PlanNode, ScanNode, Slot};
use crate::sqlfront::Filter;
use crate::storage::{Catalog, DataType, Table, Vector};

pub(crate) trait Operator {
    fn id(&self) -> usize;
    fn next_chunk(&mut self, ctx: &mut ExecContext) -> Result<Option<DataChunk>>;
}

/// Pulls one chunk and charges the elapsed time to the operator.
pub(crate) fn pull(op: &mut dyn Operator, ctx: &mut ExecContext) -> Result<Option<DataChunk>> {
    let t = Instant::now();
    let out = op.next_chunk(ctx);
    ctx.stats[op.id()].wall_ms += t.elapsed().as_secs_f64() * 1e3;
    out
}

pub(crate) fn slot_type(plan: &LogicalPlan, catalog: &Catalog, s: Slot) -> DataType {
    match s.field {
        Field::Rid => DataType::Int64,
        Field::Column(c) => catalog.table(plan.query.relations[s.rel].table).column(c).data_type,
    }
}

fn position(layout: &[Slot], s: Slot) -> Result<usize> {
    layout
        .iter()
        .position(|&x| x == s)
        .ok_or_else(|| Error::Internal(format!("slot {s:?} missing from child layout")))
}

fn as_rids(v: &Vector) -> Vec<usize> {
    v.as_i64()
        .expect("RID vectors are integral")
        .iter()
        .map(|&r| r as usize)
        .collect()
}

/// Instantiates the operator tree; operator ids are pre-order positions.
pub(crate) fn compile<'a>(
    plan: &LogicalPlan,
    catalog: &'a Catalog,
    node: &PlanNode,
    stats: &mut Vec<OpStats>,
) -> Result<Box<dyn Operator + 'a>> {
    let id = stats.len();
    let label = match node {
        PlanNode::Scan(s) => plan.query.relations[s.rel].alias.clone(),
        _ => String::new(),
    };
    stats.push(OpStats {
        id,
        op: node.kind().name().to_string(),
        label,
        ..OpStats::default()
    });
    Ok(match node {
        PlanNode::Scan(s) => Box::new(ScanOp::new(id, s, catalog)),
        PlanNode::Join(j) => Box::new(JoinOp::new(id, plan, catalog, j, stats)?),
        PlanNode::Project { input, columns } => {
            let layout = input.output_slots();
            let positions = columns
                .iter()
                .map(|&c| position(&layout, Slot::column(c)))
                .collect::<Result<_>>()?;
            Box::new(ProjectOp {
                id,
                input: compile(plan, catalog, input, stats)?,
                positions,
            })
        }
        PlanNode::Aggregate { input, kind } => {
            let layout = input.output_slots();
            let (position, ty) = match kind {
                AggKind::Count => (None, DataType::Int64),
                AggKind::Min(c) | AggKind::Max(c) => (
                    Some(position(&layout, Slot::column(*c))?),
                    slot_type(plan, catalog, Slot::column(*c)),
                ),
            };
            Box::new(AggregateOp {
                id,
                input: compile(plan, catalog, input, stats)?,
                kind: kind.clone(),
                position,
                ty,
                done: false,
            })
        }
    })
}

struct ScanOp<'a> {
    id: usize,
    rel: usize,
    table: &'a Table,
    fields: Vec<Field>,
    filters: Vec<Filter>,
    semijoin: bool,
    zone: usize,
}

impl<'a> ScanOp<'a> {
    fn new(id: usize, s: &ScanNode, catalog: &'a Catalog) -> Self {
        ScanOp {
            id,
            rel: s.rel,
            table: catalog.table(s.table),
            fields: s.fields.clone(),
            filters: s.filters.clone(),
            semijoin: s.semijoin,
            zone: 0,
        }
    }
}

impl Operator for ScanOp<'_> {
    fn id(&self) -> usize {
        self.id
    }

    fn next_chunk(&mut self, ctx: &mut ExecContext) -> Result<Option<DataChunk>> {
        let zones = ctx.zones;
        let rows = self.table.row_count();
        let zone_count = zones.zone_count(rows);
        while self.zone < zone_count {
            let z = self.zone;
            self.zone += 1;
            let sip = if self.semijoin { ctx.sip[self.rel].as_ref() } else { None };
            if sip.is_some_and(|f| !f.zone_bits.get(z)) {
                continue;
            }
            let (start, end) = zones.bounds(z, rows);
            let len = end - start;
            let mut sel = match sip {
                Some(f) => f.row_bits.slice(start, len),
                None => Bitmap::all_set(len),
            };
            for f in &self.filters {
                f.apply_range(self.table.data(f.column.column), start, &mut sel);
            }
            let emitted = sel.count_ones();
            let st = &mut ctx.stats[self.id];
            st.zones_visited += 1;
            st.tuples_materialized += len as u64;
            st.tuples_emitted += emitted as u64;
            if emitted == 0 {
                continue;
            }
            let columns = self
                .fields
                .iter()
                .map(|f| match f {
                    Field::Column(c) => self.table.data(*c).slice(start, end),
                    Field::Rid => Vector::Int64((start as i64..end as i64).collect()),
                })
                .collect();
            return Ok(Some(DataChunk { len, columns, sel }));
        }
        Ok(None)
    }
}

struct JoinOp<'a> {
    id: usize,
    catalog: &'a Catalog,
    variant: JoinVariant,
    build: Box<dyn Operator + 'a>,
    probe: Box<dyn Operator + 'a>,
    build_types: Vec<DataType>,
    build_key_pos: Vec<usize>,
    probe_key_pos: Vec<usize>,
    /// Per output column: `(from_build, position in that child's layout)`.
    out_map: Vec<(bool, usize)>,
    /// Relation and row count of the sip target, when a `ScanSJ` consumes it.
    sip: Option<(usize, usize)>,
    table: Option<JoinTable>,
    build_cols: Vec<Vector>,
    pairs: Vec<(usize, usize)>,
}

/// Whether a `ScanSJ` of `rel` lies on the probe spine below `node`.
fn spine_has_semijoin_scan(node: &PlanNode, rel: usize) -> bool {
    match node {
        PlanNode::Scan(s) => s.rel == rel && s.semijoin,
        PlanNode::Join(j) => spine_has_semijoin_scan(&j.probe, rel),
        PlanNode::Project { input, .. } | PlanNode::Aggregate { input, .. } => spine_has_semijoin_scan(input, rel),
    }
}

impl<'a> JoinOp<'a> {
    fn new(id: usize, plan: &LogicalPlan, catalog: &'a Catalog, j: &JoinNode, stats: &mut Vec<OpStats>) -> Result<Self> {
        let build_layout = j.build.output_slots();
        let probe_layout = j.probe.output_slots();
        let build_key_pos = j
            .keys
            .iter()
            .map(|k| position(&build_layout, k.build))
            .collect::<Result<_>>()?;
        let probe_key_pos = j
            .keys
            .iter()
            .map(|k| position(&probe_layout, k.probe))
            .collect::<Result<_>>()?;
        let out_map = j
            .output
            .iter()
            .map(|&s| match build_layout.iter().position(|&x| x == s) {
                Some(p) => Ok((true, p)),
                None => position(&probe_layout, s).map(|p| (false, p)),
            })
            .collect::<Result<_>>()?;
        let sip = j
            .sip_target()
            .filter(|&t| spine_has_semijoin_scan(&j.probe, t))
            .map(|t| (t, catalog.table(plan.query.relations[t].table).row_count()));
        let build = compile(plan, catalog, &j.build, stats)?;
        let probe = compile(plan, catalog, &j.probe, stats)?;
        Ok(JoinOp {
            id,
            catalog,
            variant: j.variant,
            build,
            probe,
            build_types: build_layout.iter().map(|&s| slot_type(plan, catalog, s)).collect(),
            build_key_pos,
            probe_key_pos,
            out_map,
            sip,
            table: None,
            build_cols: Vec::new(),
            pairs: Vec::new(),
        })
    }

    fn run_build(&mut self, ctx: &mut ExecContext) -> Result<()> {
        let mut cols: Vec<Vector> = self.build_types.iter().map(|&t| Vector::empty(t)).collect();
        let mut rows = 0usize;
        while let Some(ch) = pull(&mut *self.build, ctx)? {
            let n = ch.sel.count_ones();
            if n == ch.len {
                for (c, v) in cols.iter_mut().zip(&ch.columns) {
                    c.append(v);
                }
            } else {
                let idx: Vec<usize> = ch.sel.iter_ones().collect();
                for (c, v) in cols.iter_mut().zip(&ch.columns) {
                    c.append(&v.gather(&idx));
                }
            }
            rows += n;
        }
        ctx.stats[self.id].build_rows = rows as u64;
        let zones = ctx.zones;
        let mut merged_key = None;
        match self.variant {
            JoinVariant::Hash => {}
            JoinVariant::SJoin { .. } => {
                if let Some((target, size)) = self.sip {
                    let f = build_sip_filters(as_rids(&cols[self.build_key_pos[0]]), size, zones)?;
                    ctx.register(target, f);
                }
            }
            JoinVariant::SJoinIdxR { index, .. } => {
                if let Some((target, size)) = self.sip {
                    let ix = self.catalog.rid_index(index);
                    let f = build_reverse_sip_filters(as_rids(&cols[self.build_key_pos[0]]), ix, size, zones)?;
                    ctx.register(target, f);
                }
            }
            JoinVariant::SJoinIdxM { index, target, .. } => {
                let ix = self.catalog.extended_rid_index(index);
                let far_size = self.catalog.join(ix.join_far).to_table;
                let far_size = self.catalog.table(far_size).row_count();
                let m = expand_merged_build(&as_rids(&cols[self.build_key_pos[0]]), ix, far_size, zones)?;
                cols = cols.iter().map(|c| c.gather(&m.build_rows)).collect();
                merged_key = Some(Vector::Int64(m.far_rids.iter().map(|&r| r as i64).collect()));
                if self.sip.is_some() {
                    ctx.register(target, m.filter);
                }
            }
        }
        let keys: Vec<&Vector> = self
            .build_key_pos
            .iter()
            .enumerate()
            .map(|(i, &p)| match (&merged_key, i) {
                (Some(k), 0) => k,
                _ => &cols[p],
            })
            .collect();
        self.table = Some(JoinTable::build(&keys));
        self.build_cols = cols;
        Ok(())
    }
}

impl Operator for JoinOp<'_> {
    fn id(&self) -> usize {
        self.id
    }

    fn next_chunk(&mut self, ctx: &mut ExecContext) -> Result<Option<DataChunk>> {
        if self.table.is_none() {
            self.run_build(ctx)?;
        }
        let table = self.table.as_ref().expect("built above");
        loop {
            let Some(ch) = pull(&mut *self.probe, ctx)? else {
                return Ok(None);
            };
            ctx.stats[self.id].probe_rows += ch.sel.count_ones() as u64;
            if table.is_empty() {
                continue;
            }
            let keys: Vec<&Vector> = self.probe_key_pos.iter().map(|&p| &ch.columns[p]).collect();
            self.pairs.clear();
            table.probe(&keys, ch.sel.iter_ones(), &mut self.pairs);
            if self.pairs.is_empty() {
                continue;
            }
            let bidx: Vec<usize> = self.pairs.iter().map(|p| p.0).collect();
            let pidx: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
            let columns = self
                .out_map
                .iter()
                .map(|&(from_build, p)| {
                    if from_build {
                        self.build_cols[p].gather(&bidx)
                    } else {
                        ch.columns[p].gather(&pidx)
                    }
                })
                .collect();
            let len = self.pairs.len();
            ctx.stats[self.id].output_rows += len as u64;
            return Ok(Some(DataChunk {
                len,
                columns,
                sel: Bitmap::all_set(len),
            }));
        }
    }
}

struct ProjectOp<'a> {
    id: usize,
    input: Box<dyn Operator + 'a>,
    positions: Vec<usize>,
}

impl Operator for ProjectOp<'_> {
    fn id(&self) -> usize {
        self.id
    }

    fn next_chunk(&mut self, ctx: &mut ExecContext) -> Result<Option<DataChunk>> {
        let Some(ch) = pull(&mut *self.input, ctx)? else {
            return Ok(None);
        };
        let n = ch.sel.count_ones();
        let columns = if n == ch.len {
            self.positions.iter().map(|&p| ch.columns[p].clone()).collect()
        } else {
            let idx: Vec<usize> = ch.sel.iter_ones().collect();
            self.positions.iter().map(|&p| ch.columns[p].gather(&idx)).collect()
        };
        ctx.stats[self.id].output_rows += n as u64;
        Ok(Some(DataChunk {
            len: n,
            columns,
            sel: Bitmap::all_set(n),
        }))
    }
}

struct AggregateOp<'a> {
    id: usize,
    input: Box<dyn Operator + 'a>,
    kind: AggKind,
    position: Option<usize>,
    ty: DataType,
    done: bool,
}

impl Operator for AggregateOp<'_> {
    fn id(&self) -> usize {
        self.id
    }

    fn next_chunk(&mut self, ctx: &mut ExecContext) -> Result<Option<DataChunk>> {
        if self.done {
            return Ok(None);
        }
        self.done = true;
        let want_min = matches!(self.kind, AggKind::Min(_));
        let mut count = 0u64;
        let mut best_int: Option<i64> = None;
        let mut best_str: Option<std::sync::Arc<str>> = None;
        while let Some(ch) = pull(&mut *self.input, ctx)? {
            count += ch.sel.count_ones() as u64;
            let Some(p) = self.position else {
                continue;
            };
            match &ch.columns[p] {
                Vector::Int64(v) => {
                    for i in ch.sel.iter_ones() {
                        let x = v[i];
                        best_int = Some(match best_int {
                            Some(b) if (want_min && b <= x) || (!want_min && b >= x) => b,
                            _ => x,
                        });
                    }
                }
                Vector::Str(v) => {
                    for i in ch.sel.iter_ones() {
                        let x = &v[i];
                        let keep = match &best_str {
                            Some(b) => (want_min && **b <= **x) || (!want_min && **b >= **x),
                            None => false,
                        };
                        if !keep {
                            best_str = Some(x.clone());
                        }
                    }
                }
            }
        }
        let column = match self.kind {
            AggKind::Count => Some(Vector::Int64(vec![count as i64])),
            _ if self.ty.is_integral() => best_int.map(|b| Vector::Int64(vec![b])),
            _ => best_str.map(|b| Vector::Str(vec![b])),
        };
        let Some(column) = column else {
            return Ok(None);
        };
        ctx.stats[self.id].output_rows = 1;
        Ok(Some(DataChunk {
            len: 1,
            columns: vec![column],
            sel: Bitmap::all_set(1),
        }))
    }
}
