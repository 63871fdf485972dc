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

//! Predefined joins and RID materialization.
//!
//! Predefining a foreign-key join `F(from_cols) -> P(to_cols)` appends a
//! hidden column to `F` holding, for every row of `F`, the RID of the
//! unique matching row of `P`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::storage::{Catalog, Table, TableId, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JoinId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredefinedJoin {
    pub id: JoinId,
    pub from_table: TableId,
    pub from_cols: Vec<usize>,
    pub to_table: TableId,
    pub to_cols: Vec<usize>,
    /// Index of the hidden RID column in `from_table`.
    pub rid_column: usize,
}

impl PredefinedJoin {
    /// `Follows(ID1) -> Person(ID)`.
    pub fn describe(&self, catalog: &Catalog) -> String {
        let f = catalog.table(self.from_table);
        let p = catalog.table(self.to_table);
        format!(
            "{}({}) -> {}({})",
            f.name(),
            col_names(f, &self.from_cols),
            p.name(),
            col_names(p, &self.to_cols)
        )
    }

    /// Name of the hidden column, e.g. `RID(ID1)`.
    pub fn rid_column_name<'a>(&self, catalog: &'a Catalog) -> &'a str {
        &catalog.table(self.from_table).column(self.rid_column).name
    }
}

fn col_names(t: &Table, cols: &[usize]) -> String {
    cols.iter()
        .map(|&c| t.column(c).name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

enum KeyMap {
    Int(HashMap<i64, usize>),
    Composite(HashMap<Vec<Value>, usize>),
}

fn row_key(t: &Table, cols: &[usize], row: usize) -> Vec<Value> {
    cols.iter().map(|&c| t.value(c, row)).collect()
}

fn render_key(key: &[Value]) -> String {
    let parts: Vec<String> = key.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl Catalog {
    /// Registers `from(from_cols) -> to(to_cols)` and materializes its RID column.
    pub fn predefine_join(
        &mut self,
        from: TableId,
        from_cols: &[usize],
        to: TableId,
        to_cols: &[usize],
    ) -> Result<JoinId> {
        let f = self.table(from);
        let p = self.table(to);
        if from_cols.is_empty() || from_cols.len() != to_cols.len() {
            return Err(Error::TypeMismatch(
                "predefined join needs the same non-zero number of columns on both sides".into(),
            ));
        }
        for (&fc, &pc) in from_cols.iter().zip(to_cols) {
            let (fd, pd) = (f.column(fc), p.column(pc));
            if fd.data_type != pd.data_type {
                return Err(Error::TypeMismatch(format!(
                    "{}.{} is {} but {}.{} is {}",
                    f.name(),
                    fd.name,
                    fd.data_type,
                    p.name(),
                    pd.name,
                    pd.data_type
                )));
            }
        }
        let duplicate = self.joins.iter().find(|j| {
            j.from_table == from && j.from_cols == from_cols && j.to_table == to && j.to_cols == to_cols
        });
        if let Some(j) = duplicate {
            return Err(Error::AlreadyPredefined(j.describe(self)));
        }

        // One pass over P builds the key -> RID map, one pass over F probes it.
        let single_int = to_cols.len() == 1 && p.column(to_cols[0]).data_type.is_integral();
        let mut map = if single_int {
            KeyMap::Int(HashMap::with_capacity(p.row_count()))
        } else {
            KeyMap::Composite(HashMap::with_capacity(p.row_count()))
        };
        let not_a_key = |row: usize| Error::NotAKey {
            table: p.name().to_string(),
            columns: col_names(p, to_cols),
            witness: render_key(&row_key(p, to_cols, row)),
        };
        match &mut map {
            KeyMap::Int(m) => {
                for (rid, &k) in p.int_data(to_cols[0]).iter().enumerate() {
                    if m.insert(k, rid).is_some() {
                        return Err(not_a_key(rid));
                    }
                }
            }
            KeyMap::Composite(m) => {
                for rid in 0..p.row_count() {
                    if m.insert(row_key(p, to_cols, rid), rid).is_some() {
                        return Err(not_a_key(rid));
                    }
                }
            }
        }
        let dangling = |rid: usize| Error::DanglingForeignKey {
            table: f.name().to_string(),
            referenced: p.name().to_string(),
            rid,
        };
        let mut rids = Vec::with_capacity(f.row_count());
        match &map {
            KeyMap::Int(m) => {
                for (rid, k) in f.int_data(from_cols[0]).iter().enumerate() {
                    rids.push(*m.get(k).ok_or_else(|| dangling(rid))? as i64);
                }
            }
            KeyMap::Composite(m) => {
                for rid in 0..f.row_count() {
                    let target = m.get(&row_key(f, from_cols, rid)).ok_or_else(|| dangling(rid))?;
                    rids.push(*target as i64);
                }
            }
        }

        let mut name = format!("RID({})", col_names(f, from_cols));
        if f.columns().iter().any(|c| c.name == name) {
            name = format!("RID({})@{}", col_names(f, from_cols), p.name());
        }
        if f.columns().iter().any(|c| c.name == name) {
            name = format!("{name}#{}", self.joins.len());
        }
        let rid_column = self.table_mut(from).add_hidden_rid_column(name, rids);
        let id = JoinId(self.joins.len());
        self.joins.push(PredefinedJoin {
            id,
            from_table: from,
            from_cols: from_cols.to_vec(),
            to_table: to,
            to_cols: to_cols.to_vec(),
            rid_column,
        });
        Ok(id)
    }

    /// Name-based form of [`Catalog::predefine_join`].
    pub fn predefine_join_by_name<S: AsRef<str>>(
        &mut self,
        from: &str,
        from_cols: &[S],
        to: &str,
        to_cols: &[S],
    ) -> Result<JoinId> {
        let (f, p) = (self.table_id(from)?, self.table_id(to)?);
        let fc = from_cols
            .iter()
            .map(|c| self.user_column(f, c.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let pc = to_cols
            .iter()
            .map(|c| self.user_column(p, c.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.predefine_join(f, &fc, p, &pc)
    }

    pub fn join(&self, id: JoinId) -> &PredefinedJoin {
        &self.joins[id.0]
    }

    /// Finds the join registered from `from(from_cols)` to `to`.
    pub fn find_join(&self, from: TableId, from_cols: &[usize], to: TableId) -> Option<JoinId> {
        self.joins
            .iter()
            .find(|j| j.from_table == from && j.from_cols == from_cols && j.to_table == to)
            .map(|j| j.id)
    }

    /// The materialized RID values of a predefined join.
    pub fn rid_column_of(&self, id: JoinId) -> &[i64] {
        let j = self.join(id);
        self.table(j.from_table).int_data(j.rid_column)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_example;
    use crate::storage::{DataType, Visibility};
    use proptest::prelude::*;

    #[test]
    fn materializes_both_follows_joins() {
        let mut cat = running_example();
        let r1 = cat.predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"]).unwrap();
        let r2 = cat.predefine_join_by_name("Follows", &["ID2"], "Person", &["ID"]).unwrap();
        assert_eq!(cat.rid_column_of(r1), &[0, 2, 0, 1, 0]);
        assert_eq!(cat.rid_column_of(r2), &[1, 3, 2, 2, 3]);
        let follows = cat.table(cat.table_id("Follows").unwrap());
        assert_eq!(follows.column(3).visibility, Visibility::HiddenRid);
        assert_eq!(follows.column(3).name, "RID(ID1)");
        assert_eq!(follows.user_column("RID(ID1)"), None);
        assert_eq!(cat.join(r1).describe(&cat), "Follows(ID1) -> Person(ID)");
    }

    #[test]
    fn rejects_repeated_registration() {
        let mut cat = running_example();
        cat.predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"]).unwrap();
        let err = cat
            .predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"])
            .unwrap_err();
        assert!(matches!(err, Error::AlreadyPredefined(_)));
        assert_eq!(cat.predefined_joins().len(), 1);
    }

    #[test]
    fn empty_from_table() {
        let mut cat = running_example();
        cat.create_table("E", &[("pid", DataType::Int64)]).unwrap();
        let j = cat.predefine_join_by_name("E", &["pid"], "Person", &["ID"]).unwrap();
        assert!(cat.rid_column_of(j).is_empty());
    }

    #[test]
    fn dangling_and_non_key() {
        let mut cat = running_example();
        let e = cat.create_table("E", &[("pid", DataType::Int64)]).unwrap();
        cat.load_csv(e, "101\n999\n".as_bytes(), false).unwrap();
        let err = cat.predefine_join_by_name("E", &["pid"], "Person", &["ID"]).unwrap_err();
        assert_eq!(
            err,
            Error::DanglingForeignKey {
                table: "E".into(),
                referenced: "Person".into(),
                rid: 1
            }
        );
        let err = cat
            .predefine_join_by_name("Person", &["ID"], "Follows", &["ID1"])
            .unwrap_err();
        assert!(matches!(err, Error::NotAKey { ref witness, .. } if witness == "(101)"));
    }

    #[test]
    fn composite_keys_respect_column_order() {
        let mut cat = Catalog::new();
        let p = cat
            .create_table("P", &[("a", DataType::Int64), ("b", DataType::Str)])
            .unwrap();
        cat.load_csv(p, "1,x\n1,y\n2,x\n".as_bytes(), false).unwrap();
        let f = cat
            .create_table("F", &[("b", DataType::Str), ("a", DataType::Int64)])
            .unwrap();
        cat.load_csv(f, "x,2\ny,1\nx,1\n".as_bytes(), false).unwrap();
        let j = cat.predefine_join_by_name("F", &["a", "b"], "P", &["a", "b"]).unwrap();
        assert_eq!(cat.rid_column_of(j), &[2, 1, 0]);
    }

    proptest! {
        #[test]
        fn rid_column_round_trips(keys in proptest::collection::btree_set(-50i64..50, 1..20),
                                  picks in proptest::collection::vec(any::<proptest::sample::Index>(), 0..40)) {
            let keys: Vec<i64> = keys.into_iter().collect();
            let mut cat = Catalog::new();
            let p = cat.create_table("P", &[("k", DataType::Int64)]).unwrap();
            let f = cat.create_table("F", &[("fk", DataType::Int64)]).unwrap();
            for k in &keys {
                cat.append_row(p, vec![Value::Int64(*k)]).unwrap();
            }
            for ix in &picks {
                cat.append_row(f, vec![Value::Int64(keys[ix.index(keys.len())])]).unwrap();
            }
            let j = cat.predefine_join(f, &[0], p, &[0]).unwrap();
            let rids = cat.rid_column_of(j);
            for (frow, &prow) in rids.iter().enumerate() {
                prop_assert!((prow as usize) < keys.len());
                prop_assert_eq!(cat.table(p).value(0, prow as usize), cat.table(f).value(0, frow));
            }
        }
    }
}
