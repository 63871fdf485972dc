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

//! CSR RID indices over materialized RID columns.
//!
//! A [`RidIndex`] on a predefined join `F -> P` maps every RID of `P` to
//! the ascending list of `F` RIDs referencing it. An [`ExtendedRidIndex`]
//! pairs each of those `F` RIDs with the RID stored in a second predefined
//! join of `F`, so a lookup walks `P1 -> F -> P2` without touching `F`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ridmat::JoinId;
use crate::storage::Catalog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RidIndexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ExtendedRidIndexId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RidIndex {
    pub id: RidIndexId,
    pub join: JoinId,
    offsets: Vec<usize>,
    values: Vec<usize>,
}

/// Counting-sort grouping of `keys` (values in `0..key_count`).
///
/// Returns CSR offsets and, for each slot, the position in `keys` it came
/// from. Positions within a group stay ascending.
fn group_by_key(keys: &[i64], key_count: usize) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; key_count + 1];
    for &k in keys {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..key_count {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut positions = vec![0usize; keys.len()];
    for (pos, &k) in keys.iter().enumerate() {
        let slot = &mut cursor[k as usize];
        positions[*slot] = pos;
        *slot += 1;
    }
    (offsets, positions)
}

impl RidIndex {
    fn build(catalog: &Catalog, id: RidIndexId, join: JoinId) -> Self {
        let key_count = catalog.table(catalog.join(join).to_table).row_count();
        let (offsets, values) = group_by_key(catalog.rid_column_of(join), key_count);
        Self {
            id,
            join,
            offsets,
            values,
        }
    }

    /// Number of `P` RIDs the index covers.
    pub fn key_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `F` RIDs whose materialized RID equals `p_rid`, ascending.
    pub fn neighbors(&self, p_rid: usize) -> Result<&[usize]> {
        if p_rid >= self.key_count() {
            return Err(Error::RidOutOfRange {
                rid: p_rid,
                len: self.key_count(),
            });
        }
        Ok(&self.values[self.offsets[p_rid]..self.offsets[p_rid + 1]])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedRidIndex {
    pub id: ExtendedRidIndexId,
    pub join_near: JoinId,
    pub join_far: JoinId,
    offsets: Vec<usize>,
    /// `(F RID, P2 RID)` pairs.
    entries: Vec<(usize, usize)>,
}

impl ExtendedRidIndex {
    fn build(catalog: &Catalog, id: ExtendedRidIndexId, near: JoinId, far: JoinId) -> Self {
        let key_count = catalog.table(catalog.join(near).to_table).row_count();
        let (offsets, positions) = group_by_key(catalog.rid_column_of(near), key_count);
        let far_rids = catalog.rid_column_of(far);
        let entries = positions
            .into_iter()
            .map(|f| (f, far_rids[f] as usize))
            .collect();
        Self {
            id,
            join_near: near,
            join_far: far,
            offsets,
            entries,
        }
    }

    pub fn key_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// `(F RID, P2 RID)` pairs for `p1_rid`, ascending by `F` RID.
    pub fn extended_neighbors(&self, p1_rid: usize) -> Result<&[(usize, usize)]> {
        if p1_rid >= self.key_count() {
            return Err(Error::RidOutOfRange {
                rid: p1_rid,
                len: self.key_count(),
            });
        }
        Ok(&self.entries[self.offsets[p1_rid]..self.offsets[p1_rid + 1]])
    }
}

impl Catalog {
    pub fn build_rid_index(&mut self, join: JoinId) -> Result<RidIndexId> {
        if join.0 >= self.joins.len() {
            return Err(Error::UnknownPredefinedJoin(format!("#{}", join.0)));
        }
        if self.rid_index_for(join).is_some() {
            return Err(Error::AlreadyIndexed(format!(
                "RID index on {}",
                self.join(join).describe(self)
            )));
        }
        let id = RidIndexId(self.rid_indices.len());
        let index = RidIndex::build(self, id, join);
        self.rid_indices.push(index);
        Ok(id)
    }

    pub fn build_extended_rid_index(&mut self, near: JoinId, far: JoinId) -> Result<ExtendedRidIndexId> {
        for j in [near, far] {
            if j.0 >= self.joins.len() {
                return Err(Error::UnknownPredefinedJoin(format!("#{}", j.0)));
            }
        }
        let (n, f) = (self.join(near), self.join(far));
        if n.from_table != f.from_table {
            return Err(Error::JoinsOnDifferentTables(
                self.table(n.from_table).name().to_string(),
                self.table(f.from_table).name().to_string(),
            ));
        }
        if self.extended_index_for(near, far).is_some() {
            return Err(Error::AlreadyIndexed(format!(
                "extended RID index from {} to {}",
                n.describe(self),
                f.describe(self)
            )));
        }
        let id = ExtendedRidIndexId(self.extended_indices.len());
        let index = ExtendedRidIndex::build(self, id, near, far);
        self.extended_indices.push(index);
        Ok(id)
    }

    pub fn rid_index(&self, id: RidIndexId) -> &RidIndex {
        &self.rid_indices[id.0]
    }

    pub fn extended_rid_index(&self, id: ExtendedRidIndexId) -> &ExtendedRidIndex {
        &self.extended_indices[id.0]
    }

    pub fn rid_index_for(&self, join: JoinId) -> Option<&RidIndex> {
        self.rid_indices.iter().find(|i| i.join == join)
    }

    pub fn extended_index_for(&self, near: JoinId, far: JoinId) -> Option<&ExtendedRidIndex> {
        self.extended_indices
            .iter()
            .find(|i| i.join_near == near && i.join_far == far)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_example;
    use crate::storage::{DataType, Value};
    use proptest::prelude::*;

    fn indexed() -> (Catalog, JoinId, JoinId) {
        let mut cat = running_example();
        let r1 = cat.predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"]).unwrap();
        let r2 = cat.predefine_join_by_name("Follows", &["ID2"], "Person", &["ID"]).unwrap();
        (cat, r1, r2)
    }

    #[test]
    fn csr_layout_matches_grouping() {
        let (mut cat, r1, r2) = indexed();
        let i1 = cat.build_rid_index(r1).unwrap();
        let i2 = cat.build_rid_index(r2).unwrap();
        let idx = cat.rid_index(i1);
        assert_eq!(idx.offsets(), &[0, 3, 4, 5, 5]);
        assert_eq!(idx.values(), &[0, 2, 4, 3, 1]);
        let idx = cat.rid_index(i2);
        assert_eq!(idx.offsets(), &[0, 0, 1, 3, 5]);
        assert_eq!(idx.values(), &[0, 2, 3, 1, 4]);
        assert!(matches!(cat.build_rid_index(r1), Err(Error::AlreadyIndexed(_))));
    }

    #[test]
    fn neighbor_lookups() {
        let (mut cat, r1, _) = indexed();
        let id = cat.build_rid_index(r1).unwrap();
        let idx = cat.rid_index(id);
        assert_eq!(idx.neighbors(1).unwrap(), &[3]);
        assert_eq!(idx.neighbors(3).unwrap(), &[] as &[usize]);
        assert_eq!(idx.neighbors(7), Err(Error::RidOutOfRange { rid: 7, len: 4 }));
    }

    #[test]
    fn extended_forward_and_backward() {
        let (mut cat, r1, r2) = indexed();
        let fwd = cat.build_extended_rid_index(r1, r2).unwrap();
        let bwd = cat.build_extended_rid_index(r2, r1).unwrap();
        let fwd = cat.extended_rid_index(fwd);
        assert_eq!(fwd.extended_neighbors(0).unwrap(), &[(0, 1), (2, 2), (4, 3)]);
        assert_eq!(fwd.extended_neighbors(1).unwrap(), &[(3, 2)]);
        assert_eq!(fwd.extended_neighbors(2).unwrap(), &[(1, 3)]);
        assert!(fwd.extended_neighbors(3).unwrap().is_empty());
        assert!(matches!(fwd.extended_neighbors(4), Err(Error::RidOutOfRange { .. })));
        let bwd = cat.extended_rid_index(bwd);
        assert_eq!(bwd.extended_neighbors(2).unwrap(), &[(2, 0), (3, 1)]);
        assert!(matches!(
            cat.build_extended_rid_index(r1, r2),
            Err(Error::AlreadyIndexed(_))
        ));
    }

    #[test]
    fn extended_requires_same_from_table() {
        let (mut cat, r1, _) = indexed();
        let c = cat.create_table("C", &[("pid", DataType::Int64)]).unwrap();
        cat.append_row(c, vec![Value::Int64(101)]).unwrap();
        let jc = cat.predefine_join_by_name("C", &["pid"], "Person", &["ID"]).unwrap();
        assert_eq!(
            cat.build_extended_rid_index(r1, jc),
            Err(Error::JoinsOnDifferentTables("Follows".into(), "C".into()))
        );
    }

    #[test]
    fn empty_from_table_has_empty_lists() {
        let mut cat = running_example();
        cat.create_table("E", &[("a", DataType::Int64), ("b", DataType::Int64)]).unwrap();
        let a = cat.predefine_join_by_name("E", &["a"], "Person", &["ID"]).unwrap();
        let b = cat.predefine_join_by_name("E", &["b"], "Person", &["ID"]).unwrap();
        let i = cat.build_rid_index(a).unwrap();
        assert_eq!(cat.rid_index(i).offsets(), &[0, 0, 0, 0, 0]);
        let e = cat.build_extended_rid_index(a, b).unwrap();
        assert!(cat.extended_rid_index(e).entries().is_empty());
    }

    proptest! {
        #[test]
        fn csr_invariants(n_p in 1usize..20, edges in proptest::collection::vec((0usize..1000, 0usize..1000), 0..60)) {
            let mut cat = Catalog::new();
            let p = cat.create_table("P", &[("k", DataType::Int64)]).unwrap();
            let f = cat.create_table("F", &[("a", DataType::Int64), ("b", DataType::Int64)]).unwrap();
            for k in 0..n_p {
                cat.append_row(p, vec![Value::Int64(k as i64)]).unwrap();
            }
            for (a, b) in &edges {
                cat.append_row(f, vec![Value::Int64((a % n_p) as i64), Value::Int64((b % n_p) as i64)]).unwrap();
            }
            let ja = cat.predefine_join(f, &[0], p, &[0]).unwrap();
            let jb = cat.predefine_join(f, &[1], p, &[0]).unwrap();
            let ix = cat.build_rid_index(ja).unwrap();
            let ex = cat.build_extended_rid_index(ja, jb).unwrap();
            let idx = cat.rid_index(ix);
            prop_assert!(idx.offsets().windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(idx.offsets()[0], 0);
            prop_assert_eq!(*idx.offsets().last().unwrap(), edges.len());
            let mut flat = idx.values().to_vec();
            flat.sort_unstable();
            prop_assert_eq!(flat, (0..edges.len()).collect::<Vec<_>>());
            let near = cat.rid_column_of(ja);
            let far = cat.rid_column_of(jb);
            for key in 0..n_p {
                let brute: Vec<usize> = (0..edges.len()).filter(|&r| near[r] as usize == key).collect();
                prop_assert_eq!(idx.neighbors(key).unwrap(), brute.as_slice());
                let pairs: Vec<(usize, usize)> = brute.iter().map(|&r| (r, far[r] as usize)).collect();
                prop_assert_eq!(cat.extended_rid_index(ex).extended_neighbors(key).unwrap(), pairs.as_slice());
            }
        }
    }
}
