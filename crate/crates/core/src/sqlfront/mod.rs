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

//! The SQL subset: conjunctive select-project-join queries with comparison
//! filters, plus the DDL for predefined joins and RID indices.

mod ast;
mod bind;
mod lexer;
mod parser;

pub use ast::{
    Aggregate, CmpOp, ColumnName, FilterPredicate, JoinPredicate, Literal, QuerySpec, SelectList, Statement, TableRef,
};
pub use bind::{bind, ColRef, Filter, JoinPred, Output, Query, Relation};
pub use parser::{parse, parse_script};

use crate::error::{Error, Result};
use crate::storage::Catalog;

/// Parses and binds a single `SELECT`.
pub fn parse_query(sql: &str, catalog: &Catalog) -> Result<Query> {
    match parse(sql)? {
        Statement::Query(q) | Statement::Explain(q) => bind(&q, catalog),
        other => Err(Error::UnsupportedFeature(format!("expected a query, got `{other}`"))),
    }
}
