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

//! Indented text rendering of plans.

use std::fmt::Write;

use super::{AggKind, Field, JoinVariant, LogicalPlan, PlanNode, Slot};
use crate::sqlfront::Filter;
use crate::storage::{Catalog, Value};

/// One line per operator, operator kind first, build child before probe child.
pub fn explain(plan: &LogicalPlan, catalog: &Catalog) -> String {
    let mut out = String::new();
    render(plan, catalog, &plan.root, 0, &mut out);
    out
}

fn slot_name(plan: &LogicalPlan, catalog: &Catalog, s: Slot) -> String {
    let rel = &plan.query.relations[s.rel];
    match s.field {
        Field::Rid => format!("{}.RID", rel.alias),
        Field::Column(c) => format!("{}.{}", rel.alias, catalog.table(rel.table).column(c).name),
    }
}

fn literal(v: &Value) -> String {
    match v {
        Value::Int64(_) => v.to_string(),
        Value::Str(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Date(_) => format!("DATE '{v}'"),
    }
}

fn filter_text(plan: &LogicalPlan, catalog: &Catalog, f: &Filter) -> String {
    format!(
        "{} {} {}",
        slot_name(plan, catalog, Slot::column(f.column)),
        f.op.symbol(),
        literal(&f.value)
    )
}

fn render(plan: &LogicalPlan, catalog: &Catalog, node: &PlanNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let name = |s: Slot| slot_name(plan, catalog, s);
    let alias = |r: usize| plan.query.relations[r].alias.as_str();
    match node {
        PlanNode::Scan(s) => {
            let table = catalog.table(s.table).name();
            let _ = write!(out, "{pad}{} {} ({table})", node.kind().name(), alias(s.rel));
            if !s.filters.is_empty() {
                let fs: Vec<String> = s.filters.iter().map(|f| filter_text(plan, catalog, f)).collect();
                let _ = write!(out, " filter=[{}]", fs.join(" AND "));
            }
            out.push('\n');
        }
        PlanNode::Join(j) => {
            let mut keys: Vec<String> = Vec::new();
            for (i, k) in j.keys.iter().enumerate() {
                match j.variant {
                    JoinVariant::SJoinIdxM { merged, .. } if i == 0 => {
                        keys.push(format!("{} -> {} via {}", name(k.build), name(k.probe), alias(merged)))
                    }
                    _ => keys.push(format!("{} = {}", name(k.build), name(k.probe))),
                }
            }
            let _ = write!(out, "{pad}{} [{}]", j.kind().name(), keys.join(" AND "));
            if let Some(t) = j.sip_target() {
                let _ = write!(out, " sip={}", alias(t));
            }
            out.push('\n');
            render(plan, catalog, &j.build, depth + 1, out);
            render(plan, catalog, &j.probe, depth + 1, out);
        }
        PlanNode::Project { input, columns } => {
            let cols: Vec<String> = columns.iter().map(|&c| name(Slot::column(c))).collect();
            let _ = writeln!(out, "{pad}Project [{}]", cols.join(", "));
            render(plan, catalog, input, depth + 1, out);
        }
        PlanNode::Aggregate { input, kind } => {
            let what = match kind {
                AggKind::Count => "count(*)".to_string(),
                AggKind::Min(c) => format!("min({})", name(Slot::column(*c))),
                AggKind::Max(c) => format!("max({})", name(Slot::column(*c))),
            };
            let _ = writeln!(out, "{pad}Aggregate {what}");
            render(plan, catalog, input, depth + 1, out);
        }
    }
}
