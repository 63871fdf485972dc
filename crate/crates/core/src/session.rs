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

//! Statement execution over one catalog: DDL, loading, queries and EXPLAIN.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec::{execute, ExecStats, ResultSet};
use crate::planner::{explain, plan_baseline, rewrite_predefined, AblationFlags, CardMode, CardinalitySource, LogicalPlan};
use crate::sqlfront::{bind, parse_script, Literal, Query, Statement};
use crate::storage::{Catalog, Value, ZoneConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub zones: ZoneConfig,
    pub cards: CardMode,
    pub flags: AblationFlags,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            zones: ZoneConfig::default(),
            cards: CardMode::Exact,
            flags: AblationFlags::FULL,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum StatementResult {
    /// A statement without a result set, with a one-line summary.
    Done(String),
    Query {
        plan: LogicalPlan,
        result: ResultSet,
        stats: ExecStats,
    },
    Explain {
        baseline: String,
        rewritten: String,
    },
}

/// A failing statement of a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptError {
    /// 1-based position of the failing statement, or of the syntax error.
    pub line: usize,
    pub column: usize,
    pub error: Error,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.error)
    }
}

impl std::error::Error for ScriptError {}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub struct Session {
    catalog: Catalog,
    config: SessionConfig,
    base_dir: PathBuf,
}

impl Session {
    pub fn new(config: SessionConfig) -> Self {
        Self::with_catalog(Catalog::new(), config)
    }

    pub fn with_catalog(catalog: Catalog, config: SessionConfig) -> Self {
        Session {
            catalog,
            config,
            base_dir: PathBuf::from("."),
        }
    }

    /// Directory that relative `COPY` paths are resolved against.
    pub fn set_base_dir(&mut self, dir: &Path) {
        self.base_dir = dir.to_path_buf();
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn catalog_mut(&mut self) -> &mut Catalog {
        &mut self.catalog
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// The cost-based plan and its rewrite under the session's flags.
    pub fn plan(&self, query: &Query) -> Result<(LogicalPlan, LogicalPlan)> {
        let mut cards = CardinalitySource::new(&self.catalog, query, self.config.cards.clone());
        let baseline = plan_baseline(query, &mut cards)?;
        let rewritten = rewrite_predefined(&baseline, &self.catalog, self.config.flags);
        Ok((baseline, rewritten))
    }

    /// Plans and runs one `SELECT`.
    pub fn query(&self, sql: &str) -> Result<(ResultSet, ExecStats)> {
        let query = crate::sqlfront::parse_query(sql, &self.catalog)?;
        let (_, plan) = self.plan(&query)?;
        execute(&plan, &self.catalog, self.config.zones)
    }

    pub fn execute(&mut self, stmt: &Statement) -> Result<StatementResult> {
        match stmt {
            Statement::Query(spec) => {
                let query = bind(spec, &self.catalog)?;
                let (_, plan) = self.plan(&query)?;
                let (result, stats) = execute(&plan, &self.catalog, self.config.zones)?;
                Ok(StatementResult::Query { plan, result, stats })
            }
            Statement::Explain(spec) => {
                let query = bind(spec, &self.catalog)?;
                let (baseline, rewritten) = self.plan(&query)?;
                Ok(StatementResult::Explain {
                    baseline: explain(&baseline, &self.catalog),
                    rewritten: explain(&rewritten, &self.catalog),
                })
            }
            Statement::CreateTable { name, columns } => {
                self.catalog.create_table(name, columns)?;
                Ok(StatementResult::Done(format!("CREATE TABLE {name}")))
            }
            Statement::CopyCsv { table, path, header } => {
                let id = self.catalog.table_id(table)?;
                let full = self.base_dir.join(path);
                let file = std::fs::File::open(&full).map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
                let n = self.catalog.load_csv(id, std::io::BufReader::new(file), *header)?;
                Ok(StatementResult::Done(format!("COPY {n}")))
            }
            Statement::Insert { table, rows } => {
                let id = self.catalog.table_id(table)?;
                for row in rows {
                    let values = row
                        .iter()
                        .map(|l| match l {
                            Literal::Int(v) => Value::Int64(*v),
                            Literal::Str(s) => Value::str(s),
                            Literal::Date(d) => Value::Date(*d),
                        })
                        .collect();
                    self.catalog.append_row(id, values)?;
                }
                Ok(StatementResult::Done(format!("INSERT {}", rows.len())))
            }
            Statement::PredefineJoin {
                from_table,
                from_cols,
                to_table,
                to_cols,
            } => {
                let id = self.catalog.predefine_join_by_name(from_table, from_cols, to_table, to_cols)?;
                Ok(StatementResult::Done(format!(
                    "PREDEFINE JOIN {}",
                    self.catalog.join(id).describe(&self.catalog)
                )))
            }
            Statement::CreateRidIndex {
                table,
                referenced,
                columns,
            } => {
                let join = self.lookup_join(table, columns, referenced)?;
                self.catalog.build_rid_index(join)?;
                Ok(StatementResult::Done(format!(
                    "CREATE RID INDEX {}",
                    self.catalog.join(join).describe(&self.catalog)
                )))
            }
            Statement::CreateExtendedRidIndex {
                table,
                near_table,
                near_cols,
                far_table,
                far_cols,
            } => {
                let near = self.lookup_join(table, near_cols, near_table)?;
                let far = self.lookup_join(table, far_cols, far_table)?;
                self.catalog.build_extended_rid_index(near, far)?;
                Ok(StatementResult::Done(format!("CREATE EXTENDED RID INDEX ON {table}")))
            }
        }
    }

    fn lookup_join(&self, from: &str, cols: &[String], to: &str) -> Result<crate::ridmat::JoinId> {
        let f = self.catalog.table_id(from)?;
        let p = self.catalog.table_id(to)?;
        let cols = cols
            .iter()
            .map(|c| self.catalog.user_column(f, c))
            .collect::<Result<Vec<_>>>()?;
        self.catalog
            .find_join(f, &cols, p)
            .ok_or_else(|| Error::UnknownPredefinedJoin(format!("{from} -> {to}")))
    }

    /// Parses the whole script, then runs its statements in order, stopping
    /// at the first failure.
    pub fn run_script(&mut self, text: &str) -> std::result::Result<Vec<StatementResult>, ScriptError> {
        self.run_statements(text, false)
    }

    /// Like [`Session::run_script`], but every `SELECT` is explained instead of run.
    pub fn explain_script(&mut self, text: &str) -> std::result::Result<Vec<StatementResult>, ScriptError> {
        self.run_statements(text, true)
    }

    fn run_statements(&mut self, text: &str, explain_only: bool) -> std::result::Result<Vec<StatementResult>, ScriptError> {
        let at = |offset: usize, error: Error| {
            let (line, column) = line_column(text, offset);
            ScriptError { line, column, error }
        };
        let statements = parse_script(text).map_err(|e| match e {
            Error::SyntaxError { position, .. } => at(position, e),
            other => ScriptError {
                line: 1,
                column: 1,
                error: other,
            },
        })?;
        let mut out = Vec::with_capacity(statements.len());
        for (offset, stmt) in statements {
            let stmt = match stmt {
                Statement::Query(spec) if explain_only => Statement::Explain(spec),
                other => other,
            };
            out.push(self.execute(&stmt).map_err(|e| at(offset, e))?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_positions() {
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
        assert_eq!(line_column("ab", 0), (1, 1));
        let mut s = Session::new(SessionConfig::default());
        let err = s
            .run_script("CREATE TABLE T (a INT);\nINSERT INTO T VALUES (1);\nSELECT * FROM U;")
            .unwrap_err();
        assert_eq!((err.line, err.column), (3, 1));
        assert!(matches!(err.error, Error::ResolutionError(_)));
        let err = s.run_script("SELECT *\nFROM T WHERE a = = 1;").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.error, Error::SyntaxError { .. }));
    }

    #[test]
    fn inserts_and_queries() {
        let mut s = Session::new(SessionConfig::default());
        let out = s
            .run_script(
                "CREATE TABLE T (a INT, d DATE); INSERT INTO T VALUES (1, DATE '2020-01-02'), (2, '2021-03-04');\
                 SELECT d FROM T WHERE a >= 2;",
            )
            .unwrap();
        let StatementResult::Query { result, .. } = &out[2] else {
            panic!("expected rows");
        };
        assert_eq!(result.rows(), vec![vec![Value::Date(crate::storage::parse_date("2021-03-04").unwrap())]]);
    }
}
