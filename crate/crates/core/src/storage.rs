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

//! Immutable-after-load columnar tables, zones and the catalog.
//!
//! A row's RID is its position in the table. RIDs are never stored for
//! user tables; scans synthesize them from the zone offset.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ridindex::{ExtendedRidIndex, RidIndex};
use crate::ridmat::PredefinedJoin;

pub const DEFAULT_ZONE_SIZE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DataType {
    Int64,
    Str,
    /// Days since 1970-01-01, stored as a 64-bit integer.
    Date,
}

impl DataType {
    pub fn name(self) -> &'static str {
        match self {
            DataType::Int64 => "BIGINT",
            DataType::Str => "VARCHAR",
            DataType::Date => "DATE",
        }
    }

    /// Whether the physical representation is an `i64` vector.
    pub fn is_integral(self) -> bool {
        matches!(self, DataType::Int64 | DataType::Date)
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single attribute value. There are no nulls.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int64(i64),
    Str(Arc<str>),
    Date(i64),
}

impl Value {
    pub fn str(s: &str) -> Self {
        Value::Str(Arc::from(s))
    }

    pub fn data_type(&self) -> DataType {
        match self {
            Value::Int64(_) => DataType::Int64,
            Value::Str(_) => DataType::Str,
            Value::Date(_) => DataType::Date,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Int64(v) | Value::Date(v) => Some(*v),
            Value::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Parses `text` as a value of type `ty`.
    pub fn parse(text: &str, ty: DataType) -> Option<Value> {
        match ty {
            DataType::Int64 => text.trim().parse().ok().map(Value::Int64),
            DataType::Str => Some(Value::str(text)),
            DataType::Date => parse_date(text.trim()).map(Value::Date),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int64(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
            Value::Date(d) => f.write_str(&format_date(*d)),
        }
    }
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")
}

/// Parses an ISO-8601 calendar date into days since the epoch.
pub fn parse_date(text: &str) -> Option<i64> {
    let d = NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()?;
    Some((d - epoch()).num_days())
}

pub fn format_date(days: i64) -> String {
    match epoch().checked_add_signed(chrono::Duration::days(days)) {
        Some(d) => d.format("%Y-%m-%d").to_string(),
        None => days.to_string(),
    }
}

/// A contiguous vector of column values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Vector {
    Int64(Vec<i64>),
    Str(Vec<Arc<str>>),
}

impl Vector {
    pub fn empty(ty: DataType) -> Self {
        Self::with_capacity(ty, 0)
    }

    pub fn with_capacity(ty: DataType, cap: usize) -> Self {
        if ty.is_integral() {
            Vector::Int64(Vec::with_capacity(cap))
        } else {
            Vector::Str(Vec::with_capacity(cap))
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Vector::Int64(v) => v.len(),
            Vector::Str(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_i64(&self) -> Option<&[i64]> {
        match self {
            Vector::Int64(v) => Some(v),
            Vector::Str(_) => None,
        }
    }

    /// Reads position `i` as a value of logical type `ty`.
    pub fn value(&self, i: usize, ty: DataType) -> Value {
        match (self, ty) {
            (Vector::Int64(v), DataType::Date) => Value::Date(v[i]),
            (Vector::Int64(v), _) => Value::Int64(v[i]),
            (Vector::Str(v), _) => Value::Str(v[i].clone()),
        }
    }

    /// Copies `[start, end)` into a new vector.
    pub fn slice(&self, start: usize, end: usize) -> Vector {
        match self {
            Vector::Int64(v) => Vector::Int64(v[start..end].to_vec()),
            Vector::Str(v) => Vector::Str(v[start..end].to_vec()),
        }
    }

    /// Appends `other[i]`. Panics when the physical types differ.
    #[inline]
    pub fn push_from(&mut self, other: &Vector, i: usize) {
        match (self, other) {
            (Vector::Int64(a), Vector::Int64(b)) => a.push(b[i]),
            (Vector::Str(a), Vector::Str(b)) => a.push(b[i].clone()),
            _ => panic!("vector type mismatch"),
        }
    }

    /// Copies the positions listed in `idx`, in order.
    pub fn gather(&self, idx: &[usize]) -> Vector {
        match self {
            Vector::Int64(v) => Vector::Int64(idx.iter().map(|&i| v[i]).collect()),
            Vector::Str(v) => Vector::Str(idx.iter().map(|&i| v[i].clone()).collect()),
        }
    }

    /// Appends all of `other`. Panics when the physical types differ.
    pub fn append(&mut self, other: &Vector) {
        match (self, other) {
            (Vector::Int64(a), Vector::Int64(b)) => a.extend_from_slice(b),
            (Vector::Str(a), Vector::Str(b)) => a.extend(b.iter().cloned()),
            _ => panic!("vector type mismatch"),
        }
    }

    fn push_value(&mut self, v: Value) {
        match (self, v) {
            (Vector::Int64(a), Value::Int64(x) | Value::Date(x)) => a.push(x),
            (Vector::Str(a), Value::Str(s)) => a.push(s),
            _ => panic!("value type mismatch"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Visibility {
    User,
    /// A materialized RID column; invisible to SQL name resolution.
    HiddenRid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDef {
    pub name: String,
    pub data_type: DataType,
    pub visibility: Visibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TableId(pub usize);

#[derive(Debug, Clone)]
pub struct Table {
    name: String,
    columns: Vec<ColumnDef>,
    data: Vec<Vector>,
    row_count: usize,
}

impl Table {
    fn new(name: String, columns: Vec<ColumnDef>) -> Self {
        let data = columns.iter().map(|c| Vector::empty(c.data_type)).collect();
        Self {
            name,
            columns,
            data,
            row_count: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn columns(&self) -> &[ColumnDef] {
        &self.columns
    }

    pub fn column(&self, idx: usize) -> &ColumnDef {
        &self.columns[idx]
    }

    pub fn data(&self, idx: usize) -> &Vector {
        &self.data[idx]
    }

    /// Integer view of an `Int64`/`Date`/RID column.
    pub fn int_data(&self, idx: usize) -> &[i64] {
        self.data[idx]
            .as_i64()
            .expect("integral column stored as Int64 vector")
    }

    /// Index of a user-visible column.
    pub fn user_column(&self, name: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.visibility == Visibility::User && c.name == name)
    }

    pub fn user_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.visibility == Visibility::User)
            .map(|(i, _)| i)
    }

    pub fn has_hidden_columns(&self) -> bool {
        self.columns
            .iter()
            .any(|c| c.visibility == Visibility::HiddenRid)
    }

    pub fn value(&self, col: usize, row: usize) -> Value {
        self.data[col].value(row, self.columns[col].data_type)
    }

    pub fn zone_count(&self, zones: ZoneConfig) -> usize {
        self.row_count.div_ceil(zones.zone_size())
    }

    /// Reads one zone: the requested columns plus the virtual RID vector.
    pub fn scan_zone(&self, zones: ZoneConfig, zone: usize, columns: &[usize]) -> Result<ZoneChunk> {
        let zone_count = self.zone_count(zones);
        if zone >= zone_count {
            return Err(Error::ZoneOutOfRange { zone, zone_count });
        }
        let (start, end) = zones.bounds(zone, self.row_count);
        Ok(ZoneChunk {
            columns: columns.iter().map(|&c| self.data[c].slice(start, end)).collect(),
            rids: (start..end).collect(),
        })
    }

    fn push_row(&mut self, values: Vec<Value>) {
        for (col, v) in self.data.iter_mut().zip(values) {
            col.push_value(v);
        }
        self.row_count += 1;
    }

    pub(crate) fn add_hidden_rid_column(&mut self, name: String, rids: Vec<i64>) -> usize {
        debug_assert_eq!(rids.len(), self.row_count);
        self.columns.push(ColumnDef {
            name,
            data_type: DataType::Int64,
            visibility: Visibility::HiddenRid,
        });
        self.data.push(Vector::Int64(rids));
        self.columns.len() - 1
    }
}

/// Output of [`Table::scan_zone`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneChunk {
    pub columns: Vec<Vector>,
    pub rids: Vec<usize>,
}

/// Rows per zone. Row `r` lives in zone `r / zone_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZoneConfig {
    zone_size: usize,
}

impl ZoneConfig {
    pub fn new(zone_size: usize) -> Result<Self> {
        if zone_size == 0 {
            return Err(Error::TypeMismatch("zone size must be positive".into()));
        }
        Ok(Self { zone_size })
    }

    pub fn zone_size(self) -> usize {
        self.zone_size
    }

    #[inline]
    pub fn zone_of(self, rid: usize) -> usize {
        rid / self.zone_size
    }

    pub fn zone_count(self, rows: usize) -> usize {
        rows.div_ceil(self.zone_size)
    }

    /// Row range `[start, end)` of `zone` in a table of `rows` rows.
    pub fn bounds(self, zone: usize, rows: usize) -> (usize, usize) {
        let start = zone * self.zone_size;
        (start, (start + self.zone_size).min(rows))
    }
}

impl Default for ZoneConfig {
    fn default() -> Self {
        Self {
            zone_size: DEFAULT_ZONE_SIZE,
        }
    }
}

/// Tables, predefined joins and RID indices.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    tables: Vec<Table>,
    by_name: HashMap<String, TableId>,
    pub(crate) joins: Vec<PredefinedJoin>,
    pub(crate) rid_indices: Vec<RidIndex>,
    pub(crate) extended_indices: Vec<ExtendedRidIndex>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create_table<S: AsRef<str>>(&mut self, name: &str, schema: &[(S, DataType)]) -> Result<TableId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateTable(name.to_string()));
        }
        let mut columns: Vec<ColumnDef> = Vec::with_capacity(schema.len());
        for (col, ty) in schema {
            let col = col.as_ref();
            if columns.iter().any(|c| c.name == col) {
                return Err(Error::DuplicateColumn(col.to_string()));
            }
            columns.push(ColumnDef {
                name: col.to_string(),
                data_type: *ty,
                visibility: Visibility::User,
            });
        }
        let id = TableId(self.tables.len());
        self.tables.push(Table::new(name.to_string(), columns));
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn table(&self, id: TableId) -> &Table {
        &self.tables[id.0]
    }

    pub(crate) fn table_mut(&mut self, id: TableId) -> &mut Table {
        &mut self.tables[id.0]
    }

    pub fn tables(&self) -> impl Iterator<Item = (TableId, &Table)> {
        self.tables.iter().enumerate().map(|(i, t)| (TableId(i), t))
    }

    pub fn table_id(&self, name: &str) -> Result<TableId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownTable(name.to_string()))
    }

    pub fn user_column(&self, table: TableId, name: &str) -> Result<usize> {
        let t = self.table(table);
        t.user_column(name).ok_or_else(|| Error::UnknownColumn {
            table: t.name.clone(),
            column: name.to_string(),
        })
    }

    fn check_loadable(&self, table: TableId) -> Result<()> {
        let involved = self
            .joins
            .iter()
            .any(|j| j.from_table == table || j.to_table == table);
        if involved {
            return Err(Error::UnsupportedFeature(format!(
                "loading '{}' after a join on it was predefined",
                self.table(table).name
            )));
        }
        Ok(())
    }

    /// Appends one row of user-column values.
    pub fn append_row(&mut self, table: TableId, values: Vec<Value>) -> Result<()> {
        self.check_loadable(table)?;
        let t = self.table_mut(table);
        if values.len() != t.columns.len() {
            return Err(Error::ArityMismatch {
                line: t.row_count + 1,
                expected: t.columns.len(),
                found: values.len(),
            });
        }
        let mut coerced = Vec::with_capacity(values.len());
        for (v, c) in values.into_iter().zip(&t.columns) {
            coerced.push(coerce(v, c.data_type).ok_or_else(|| {
                Error::TypeMismatch(format!("value for column '{}' is not {}", c.name, c.data_type))
            })?);
        }
        t.push_row(coerced);
        Ok(())
    }

    /// Appends CSV records in file order and returns the number loaded.
    ///
    /// Loading is all-or-nothing: on error the table is left unchanged.
    pub fn load_csv<R: Read>(&mut self, table: TableId, source: R, header: bool) -> Result<usize> {
        self.check_loadable(table)?;
        let types: Vec<DataType> = self.table(table).columns.iter().map(|c| c.data_type).collect();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(header)
            .flexible(true)
            .from_reader(source);
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                Error::ParseError {
                    line,
                    column: 0,
                    message: e.to_string(),
                }
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            if record.len() != types.len() {
                return Err(Error::ArityMismatch {
                    line,
                    expected: types.len(),
                    found: record.len(),
                });
            }
            let mut row = Vec::with_capacity(types.len());
            for (i, (field, &ty)) in record.iter().zip(&types).enumerate() {
                let v = Value::parse(field, ty).ok_or_else(|| Error::ParseError {
                    line,
                    column: i + 1,
                    message: format!("'{field}' is not a valid {ty}"),
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        let t = self.table_mut(table);
        let n = rows.len();
        for row in rows {
            t.push_row(row);
        }
        Ok(n)
    }

    pub fn predefined_joins(&self) -> &[PredefinedJoin] {
        &self.joins
    }

    pub fn rid_indices(&self) -> &[RidIndex] {
        &self.rid_indices
    }

    pub fn extended_rid_indices(&self) -> &[ExtendedRidIndex] {
        &self.extended_indices
    }
}

fn coerce(v: Value, ty: DataType) -> Option<Value> {
    match (v, ty) {
        (v @ Value::Int64(_), DataType::Int64) => Some(v),
        (v @ Value::Date(_), DataType::Date) => Some(v),
        (v @ Value::Str(_), DataType::Str) => Some(v),
        (Value::Str(s), DataType::Date) => parse_date(&s).map(Value::Date),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PERSON_CSV: &str = "ID,name\n101,Mahinda\n202,Karim\n303,Carmen\n404,Zhang\n";

    fn person(cat: &mut Catalog) -> TableId {
        let t = cat
            .create_table("Person", &[("ID", DataType::Int64), ("name", DataType::Str)])
            .unwrap();
        cat.load_csv(t, PERSON_CSV.as_bytes(), true).unwrap();
        t
    }

    #[test]
    fn create_table_registers_empty_table() {
        let mut cat = Catalog::new();
        let t = cat
            .create_table("Person", &[("ID", DataType::Int64), ("name", DataType::Str)])
            .unwrap();
        assert_eq!(cat.table(t).row_count(), 0);
        assert_eq!(cat.table(t).user_columns().count(), 2);
        let f = cat
            .create_table(
                "Follows",
                &[("ID1", DataType::Int64), ("ID2", DataType::Int64), ("year", DataType::Int64)],
            )
            .unwrap();
        assert_eq!(cat.table(f).columns().len(), 3);
        assert_eq!(
            cat.create_table("Person", &[("x", DataType::Int64)]),
            Err(Error::DuplicateTable("Person".into()))
        );
        assert_eq!(
            cat.create_table("T", &[("x", DataType::Int64), ("x", DataType::Str)]),
            Err(Error::DuplicateColumn("x".into()))
        );
    }

    #[test]
    fn load_assigns_rids_by_position() {
        let mut cat = Catalog::new();
        let t = person(&mut cat);
        let table = cat.table(t);
        assert_eq!(table.row_count(), 4);
        assert_eq!(table.value(0, 1), Value::Int64(202));
        assert_eq!(table.value(1, 1), Value::str("Karim"));
    }

    #[test]
    fn header_only_loads_nothing() {
        let mut cat = Catalog::new();
        let t = cat
            .create_table("Person", &[("ID", DataType::Int64), ("name", DataType::Str)])
            .unwrap();
        assert_eq!(cat.load_csv(t, "ID,name\n".as_bytes(), true).unwrap(), 0);
    }

    #[test]
    fn bad_int_is_a_positioned_parse_error() {
        let mut cat = Catalog::new();
        let t = cat
            .create_table("Person", &[("ID", DataType::Int64), ("name", DataType::Str)])
            .unwrap();
        let err = cat.load_csv(t, "ID,name\n1,a\nabc,b\n".as_bytes(), true).unwrap_err();
        assert_eq!(
            err,
            Error::ParseError {
                line: 3,
                column: 1,
                message: "'abc' is not a valid BIGINT".into()
            }
        );
        assert_eq!(cat.table(t).row_count(), 0);
        let err = cat.load_csv(t, "1,a,extra\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { line: 1, expected: 2, found: 3 }));
    }

    #[test]
    fn quoted_fields_and_dates() {
        let mut cat = Catalog::new();
        let t = cat
            .create_table("E", &[("s", DataType::Str), ("d", DataType::Date)])
            .unwrap();
        cat.load_csv(t, "\"a,b\",1970-01-02\n\"say \"\"hi\"\"\",2000-03-01\n".as_bytes(), false)
            .unwrap();
        let table = cat.table(t);
        assert_eq!(table.value(0, 0), Value::str("a,b"));
        assert_eq!(table.value(0, 1), Value::str("say \"hi\""));
        assert_eq!(table.value(1, 0), Value::Date(1));
        assert_eq!(table.value(1, 1).to_string(), "2000-03-01");
    }

    #[test]
    fn scan_zone_examples() {
        let mut cat = Catalog::new();
        let t = person(&mut cat);
        let table = cat.table(t);
        let z2 = ZoneConfig::new(2).unwrap();
        let chunk = table.scan_zone(z2, 1, &[0]).unwrap();
        assert_eq!(chunk.columns, vec![Vector::Int64(vec![303, 404])]);
        assert_eq!(chunk.rids, vec![2, 3]);

        let chunk = table.scan_zone(ZoneConfig::default(), 0, &[0]).unwrap();
        assert_eq!(chunk.rids, vec![0, 1, 2, 3]);
        assert_eq!(
            table.scan_zone(z2, 2, &[0]),
            Err(Error::ZoneOutOfRange { zone: 2, zone_count: 2 })
        );

        let f = cat
            .create_table("Follows", &[("ID1", DataType::Int64), ("ID2", DataType::Int64)])
            .unwrap();
        cat.load_csv(f, "101,202\n303,404\n101,303\n202,303\n101,404\n".as_bytes(), false)
            .unwrap();
        let follows = cat.table(f);
        assert_eq!(follows.zone_count(z2), 3);
        let last = follows.scan_zone(z2, 2, &[0, 1]).unwrap();
        assert_eq!(last.rids, vec![4]);
        assert_eq!(last.columns[1], Vector::Int64(vec![404]));
    }

    proptest! {
        #[test]
        fn zones_concatenate_to_table(values in proptest::collection::vec(any::<i64>(), 0..100),
                                      zone_size in 1usize..20) {
            let mut cat = Catalog::new();
            let t = cat.create_table("T", &[("x", DataType::Int64)]).unwrap();
            let csv: String = values.iter().map(|v| format!("{v}\n")).collect();
            cat.load_csv(t, csv.as_bytes(), false).unwrap();
            let table = cat.table(t);
            let zones = ZoneConfig::new(zone_size).unwrap();
            let mut seen = Vec::new();
            let mut counter = 0usize;
            for z in 0..table.zone_count(zones) {
                let chunk = table.scan_zone(zones, z, &[0]).unwrap();
                for (i, rid) in chunk.rids.iter().enumerate() {
                    prop_assert_eq!(*rid, counter);
                    counter += 1;
                    seen.push(chunk.columns[0].as_i64().unwrap()[i]);
                }
            }
            prop_assert_eq!(seen, values);
        }
    }
}
