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

//! Exact bitmask filters passed from RID joins to semi-join scans.

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::ridindex::{ExtendedRidIndex, RidIndex};
use crate::storage::ZoneConfig;

/// A set of row positions of one table, with a per-zone summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SipFilter {
    pub zone_bits: Bitmap,
    pub row_bits: Bitmap,
}

impl SipFilter {
    pub fn empty(table_size: usize, zones: ZoneConfig) -> Self {
        SipFilter {
            zone_bits: Bitmap::new(zones.zone_count(table_size)),
            row_bits: Bitmap::new(table_size),
        }
    }

    fn insert(&mut self, rid: usize) -> Result<()> {
        if rid >= self.row_bits.len() {
            return Err(Error::RidOutOfRange {
                rid,
                len: self.row_bits.len(),
            });
        }
        self.row_bits.set(rid);
        Ok(())
    }

    /// Recomputes the zone bits from the row bits.
    fn sync_zones(&mut self, zones: ZoneConfig) {
        let n = self.row_bits.len();
        let mut zone_bits = Bitmap::new(zones.zone_count(n));
        for z in 0..zone_bits.len() {
            let (start, end) = zones.bounds(z, n);
            if self.row_bits.any_in_range(start, end) {
                zone_bits.set(z);
            }
        }
        self.zone_bits = zone_bits;
    }

    /// Keeps only rows present in both filters and recomputes the zone bits.
    pub fn intersect(&mut self, other: &SipFilter, zones: ZoneConfig) {
        self.row_bits.and_inplace(&other.row_bits);
        self.sync_zones(zones);
    }
}

/// Filter over a table of `table_size` rows with exactly `rids` set.
pub fn build_sip_filters<I>(rids: I, table_size: usize, zones: ZoneConfig) -> Result<SipFilter>
where
    I: IntoIterator<Item = usize>,
{
    let mut f = SipFilter::empty(table_size, zones);
    for rid in rids {
        f.insert(rid)?;
    }
    f.sync_zones(zones);
    Ok(f)
}

/// Filter over the referencing table: every row joining one of `build_rids`.
///
/// When the build side references most rows, starts from all rows and
/// clears the lists of the keys it misses instead.
pub fn build_reverse_sip_filters<I>(
    build_rids: I,
    index: &RidIndex,
    table_size: usize,
    zones: ZoneConfig,
) -> Result<SipFilter>
where
    I: IntoIterator<Item = usize>,
{
    let keys = index.key_count();
    if index.values().len() != table_size {
        return Err(Error::Internal(format!(
            "index covers {} rows, table has {table_size}",
            index.values().len()
        )));
    }
    let mut build = Bitmap::new(keys);
    for p in build_rids {
        if p >= keys {
            return Err(Error::RidOutOfRange { rid: p, len: keys });
        }
        build.set(p);
    }
    let off = index.offsets();
    let reached: usize = build.iter_ones().map(|p| off[p + 1] - off[p]).sum();
    let mut f = SipFilter::empty(table_size, zones);
    if 2 * reached <= table_size {
        for p in build.iter_ones() {
            for &rid in index.neighbors(p)? {
                f.row_bits.set(rid);
            }
        }
    } else {
        f.row_bits = Bitmap::all_set(table_size);
        for p in (0..keys).filter(|&p| !build.get(p)) {
            for &rid in index.neighbors(p)? {
                f.row_bits.clear(rid);
            }
        }
    }
    f.sync_zones(zones);
    Ok(f)
}

/// Build-side expansion of a merged join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedBuild {
    /// Position of the originating build row, one per reachable edge.
    pub build_rows: Vec<usize>,
    /// RID in the far table reached by that edge.
    pub far_rids: Vec<usize>,
    pub filter: SipFilter,
}

/// Follows every edge of the extended index from each row of `near_rids`.
pub fn expand_merged_build(
    near_rids: &[usize],
    index: &ExtendedRidIndex,
    far_table_size: usize,
    zones: ZoneConfig,
) -> Result<MergedBuild> {
    let mut out = MergedBuild {
        build_rows: Vec::new(),
        far_rids: Vec::new(),
        filter: SipFilter::empty(far_table_size, zones),
    };
    for (row, &p1) in near_rids.iter().enumerate() {
        for &(_, p2) in index.extended_neighbors(p1)? {
            out.build_rows.push(row);
            out.far_rids.push(p2);
            out.filter.insert(p2)?;
        }
    }
    out.filter.sync_zones(zones);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_example;
    use proptest::prelude::*;

    fn z(n: usize) -> ZoneConfig {
        ZoneConfig::new(n).unwrap()
    }

    #[test]
    fn semijoin_filters_from_rids() {
        let f = build_sip_filters([2], 4, z(2)).unwrap();
        assert_eq!(f.zone_bits.to_bools(), [false, true]);
        assert_eq!(f.row_bits.to_bools(), [false, false, true, false]);
        let f = build_sip_filters([3, 3], 4, z(2)).unwrap();
        assert_eq!(f.zone_bits.to_bools(), [false, true]);
        assert_eq!(f.row_bits.to_bools(), [false, false, false, true]);
        let f = build_sip_filters([], 4, z(2)).unwrap();
        assert!(!f.zone_bits.any() && !f.row_bits.any());
        assert_eq!(
            build_sip_filters([4], 4, z(2)),
            Err(Error::RidOutOfRange { rid: 4, len: 4 })
        );
    }

    fn follows_indexed() -> crate::Catalog {
        let mut cat = running_example();
        let j1 = cat.predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"]).unwrap();
        let j2 = cat.predefine_join_by_name("Follows", &["ID2"], "Person", &["ID"]).unwrap();
        cat.build_rid_index(j1).unwrap();
        cat.build_extended_rid_index(j1, j2).unwrap();
        cat
    }

    #[test]
    fn reverse_filters_follow_the_index() {
        let cat = follows_indexed();
        let ix = &cat.rid_indices()[0];
        let f = build_reverse_sip_filters([1], ix, 5, z(2)).unwrap();
        assert_eq!(f.row_bits.iter_ones().collect::<Vec<_>>(), [3]);
        assert_eq!(f.zone_bits.iter_ones().collect::<Vec<_>>(), [1]);
        let f = build_reverse_sip_filters([3], ix, 5, z(2)).unwrap();
        assert!(!f.row_bits.any());
        let f = build_reverse_sip_filters([0, 1, 2, 3], ix, 5, z(2)).unwrap();
        assert_eq!(f.row_bits.count_ones(), 5);
        // Mahinda's three edges are over half the table.
        let f = build_reverse_sip_filters([0], ix, 5, z(2)).unwrap();
        assert_eq!(f.row_bits.iter_ones().collect::<Vec<_>>(), [0, 2, 4]);
        assert_eq!(f.zone_bits.iter_ones().collect::<Vec<_>>(), [0, 1, 2]);
    }

    #[test]
    fn merged_build_keeps_edge_multiplicity() {
        let cat = follows_indexed();
        let ix = &cat.extended_rid_indices()[0];
        let m = expand_merged_build(&[1], ix, 4, z(2)).unwrap();
        assert_eq!(m.far_rids, [2]);
        assert_eq!(m.filter.row_bits.iter_ones().collect::<Vec<_>>(), [2]);
        let m = expand_merged_build(&[0], ix, 4, z(2)).unwrap();
        assert_eq!(m.build_rows, [0, 0, 0]);
        let mut far = m.far_rids.clone();
        far.sort();
        assert_eq!(far, [1, 2, 3]);
        let m = expand_merged_build(&[3], ix, 4, z(2)).unwrap();
        assert!(m.build_rows.is_empty());
    }

    proptest! {
        #[test]
        fn reverse_filter_matches_rid_column(rids in proptest::collection::vec(0usize..4, 0..6), zs in 1usize..4) {
            let cat = follows_indexed();
            let ix = &cat.rid_indices()[0];
            let col = cat.rid_column_of(ix.join);
            let f = build_reverse_sip_filters(rids.iter().copied(), ix, col.len(), z(zs)).unwrap();
            let want: Vec<bool> = col.iter().map(|&p| rids.contains(&(p as usize))).collect();
            prop_assert_eq!(f.row_bits.to_bools(), want);
        }


        #[test]
        fn intersection_matches_bitwise_and(
            a in proptest::collection::vec(0usize..40, 0..20),
            b in proptest::collection::vec(0usize..40, 0..20),
            zone in 1usize..9,
        ) {
            let zones = z(zone);
            let mut fa = build_sip_filters(a.iter().copied(), 40, zones).unwrap();
            let fb = build_sip_filters(b.iter().copied(), 40, zones).unwrap();
            fa.intersect(&fb, zones);
            let both = a.iter().copied().filter(|x| b.contains(x));
            prop_assert_eq!(fa, build_sip_filters(both, 40, zones).unwrap());
        }
    }
}
