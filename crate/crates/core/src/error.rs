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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report.
///
/// User-facing errors (syntax, resolution, bad data) are kept apart from
/// [`Error::Internal`], which signals a broken engine invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("table '{0}' already exists")]
    DuplicateTable(String),
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("unknown table '{0}'")]
    UnknownTable(String),
    #[error("unknown column '{column}' in table '{table}'")]
    UnknownColumn { table: String, column: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    ArityMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("zone {zone} out of range ({zone_count} zones)")]
    ZoneOutOfRange { zone: usize, zone_count: usize },
    #[error("RID {rid} out of range (table has {len} rows)")]
    RidOutOfRange { rid: usize, len: usize },
    #[error("columns {columns} of '{table}' are not a key: value {witness} repeats")]
    NotAKey {
        table: String,
        columns: String,
        witness: String,
    },
    #[error("row {rid} of '{table}' references a missing key in '{referenced}'")]
    DanglingForeignKey {
        table: String,
        referenced: String,
        rid: usize,
    },
    #[error("join {0} is already predefined")]
    AlreadyPredefined(String),
    #[error("no predefined join {0}")]
    UnknownPredefinedJoin(String),
    #[error("index {0} already exists")]
    AlreadyIndexed(String),
    #[error("predefined joins are on different tables ('{0}' and '{1}')")]
    JoinsOnDifferentTables(String, String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("syntax error at offset {position}: expected {expected}, found {found}")]
    SyntaxError {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("cannot resolve {0}")]
    ResolutionError(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("join graph is disconnected")]
    DisconnectedJoinGraph,
    #[error("invalid ablation flags: {0}")]
    InvalidFlags(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that indicate an engine bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
