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

//! Parsed statements and their canonical rendering.

use std::fmt;

use crate::storage::{format_date, DataType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    /// The operator with its operands swapped (`a < b` ⇔ `b > a`).
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            op => op,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    #[inline]
    pub fn eval<T: Ord + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Int(i64),
    Str(String),
    /// `DATE 'YYYY-MM-DD'`, as days since the epoch.
    Date(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnName {
    pub qualifier: Option<String>,
    pub name: String,
}

impl ColumnName {
    pub fn qualified(alias: &str, name: &str) -> Self {
        Self {
            qualifier: Some(alias.to_string()),
            name: name.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRef {
    pub table: String,
    pub alias: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinPredicate {
    pub left: ColumnName,
    pub right: ColumnName,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterPredicate {
    pub column: ColumnName,
    pub op: CmpOp,
    pub value: Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Aggregate {
    CountStar,
    Min(ColumnName),
    Max(ColumnName),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectList {
    /// All user columns of all relations, in FROM order.
    Star,
    Columns(Vec<ColumnName>),
    Aggregate(Aggregate),
}

/// A conjunctive select-project-join query, before name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    pub select: SelectList,
    pub relations: Vec<TableRef>,
    pub join_preds: Vec<JoinPredicate>,
    pub filter_preds: Vec<FilterPredicate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Query(QuerySpec),
    Explain(QuerySpec),
    CreateTable {
        name: String,
        columns: Vec<(String, DataType)>,
    },
    CopyCsv {
        table: String,
        path: String,
        header: bool,
    },
    Insert {
        table: String,
        rows: Vec<Vec<Literal>>,
    },
    PredefineJoin {
        from_table: String,
        from_cols: Vec<String>,
        to_table: String,
        to_cols: Vec<String>,
    },
    /// `CREATE RID INDEX ON F REFERENCES P(fk cols)`.
    CreateRidIndex {
        table: String,
        referenced: String,
        columns: Vec<String>,
    },
    /// `CREATE EXTENDED RID INDEX ON F FROM P1(near cols) TO P2(far cols)`.
    CreateExtendedRidIndex {
        table: String,
        near_table: String,
        near_cols: Vec<String>,
        far_table: String,
        far_cols: Vec<String>,
    },
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Str(s) => f.write_str(&quote(s)),
            Literal::Date(d) => write!(f, "DATE '{}'", format_date(*d)),
        }
    }
}

impl fmt::Display for ColumnName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.qualifier {
            Some(q) => write!(f, "{q}.{}", self.name),
            None => f.write_str(&self.name),
        }
    }
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        match &self.select {
            SelectList::Star => f.write_str("*")?,
            SelectList::Columns(cols) => {
                let cols: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
                f.write_str(&cols.join(", "))?;
            }
            SelectList::Aggregate(Aggregate::CountStar) => f.write_str("COUNT(*)")?,
            SelectList::Aggregate(Aggregate::Min(c)) => write!(f, "MIN({c})")?,
            SelectList::Aggregate(Aggregate::Max(c)) => write!(f, "MAX({c})")?,
        }
        f.write_str(" FROM ")?;
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|r| {
                if r.alias == r.table {
                    r.table.clone()
                } else {
                    format!("{} {}", r.table, r.alias)
                }
            })
            .collect();
        f.write_str(&rels.join(", "))?;
        let mut preds: Vec<String> = self
            .join_preds
            .iter()
            .map(|p| format!("{} = {}", p.left, p.right))
            .collect();
        preds.extend(
            self.filter_preds
                .iter()
                .map(|p| format!("{} {} {}", p.column, p.op.symbol(), p.value)),
        );
        if !preds.is_empty() {
            write!(f, " WHERE {}", preds.join(" AND "))?;
        }
        Ok(())
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Query(q) => write!(f, "{q}"),
            Statement::Explain(q) => write!(f, "EXPLAIN {q}"),
            Statement::CreateTable { name, columns } => {
                let cols: Vec<String> = columns.iter().map(|(c, t)| format!("{c} {t}")).collect();
                write!(f, "CREATE TABLE {name} ({})", cols.join(", "))
            }
            Statement::CopyCsv { table, path, header } => {
                write!(f, "COPY {table} FROM {}", quote(path))?;
                if *header {
                    f.write_str(" WITH HEADER")?;
                }
                Ok(())
            }
            Statement::Insert { table, rows } => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let vals: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                        format!("({})", vals.join(", "))
                    })
                    .collect();
                write!(f, "INSERT INTO {table} VALUES {}", rows.join(", "))
            }
            Statement::PredefineJoin {
                from_table,
                from_cols,
                to_table,
                to_cols,
            } => write!(
                f,
                "PREDEFINE JOIN {from_table}({}) REFERENCES {to_table}({})",
                from_cols.join(", "),
                to_cols.join(", ")
            ),
            Statement::CreateRidIndex {
                table,
                referenced,
                columns,
            } => write!(
                f,
                "CREATE RID INDEX ON {table} REFERENCES {referenced}({})",
                columns.join(", ")
            ),
            Statement::CreateExtendedRidIndex {
                table,
                near_table,
                near_cols,
                far_table,
                far_cols,
            } => write!(
                f,
                "CREATE EXTENDED RID INDEX ON {table} FROM {near_table}({}) TO {far_table}({})",
                near_cols.join(", "),
                far_cols.join(", ")
            ),
        }
    }
}
