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

//! Chained hash table for join build sides.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::Arc;

use crate::storage::Vector;

const NIL: u32 = u32::MAX;

/// Folds an integer key with one multiply; integer keys need no real hashing.
#[derive(Default)]
pub struct FoldHasher(u64);

impl Hasher for FoldHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }

    fn write_i64(&mut self, v: i64) {
        self.0 = (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

type IntMap = HashMap<i64, u32, BuildHasherDefault<FoldHasher>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Part {
    Int(i64),
    Str(Arc<str>),
}

fn composite(keys: &[&Vector], row: usize) -> Vec<Part> {
    keys.iter()
        .map(|v| match v {
            Vector::Int64(x) => Part::Int(x[row]),
            Vector::Str(s) => Part::Str(s[row].clone()),
        })
        .collect()
}

enum Heads {
    Int(IntMap),
    Composite(HashMap<Vec<Part>, u32>),
}

/// Maps join keys to chains of build row positions.
pub struct JoinTable {
    heads: Heads,
    next: Vec<u32>,
}

impl JoinTable {
    /// Indexes rows `0..n` of the key columns.
    pub fn build(keys: &[&Vector]) -> Self {
        let n = keys.first().map_or(0, |v| v.len());
        let mut next = vec![NIL; n];
        let heads = match keys {
            [Vector::Int64(k)] => {
                let mut map = IntMap::with_capacity_and_hasher(n, Default::default());
                // Insert in reverse so that chains list rows in build order.
                for row in (0..n).rev() {
                    if let Some(prev) = map.insert(k[row], row as u32) {
                        next[row] = prev;
                    }
                }
                Heads::Int(map)
            }
            _ => {
                let mut map = HashMap::with_capacity(n);
                for row in (0..n).rev() {
                    if let Some(prev) = map.insert(composite(keys, row), row as u32) {
                        next[row] = prev;
                    }
                }
                Heads::Composite(map)
            }
        };
        JoinTable { heads, next }
    }

    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    /// Appends `(build_row, probe_row)` for every match of the selected probe rows.
    pub fn probe(&self, keys: &[&Vector], rows: impl Iterator<Item = usize>, out: &mut Vec<(usize, usize)>) {
        match (&self.heads, keys) {
            (Heads::Int(map), [Vector::Int64(k)]) => {
                for row in rows {
                    if let Some(&h) = map.get(&k[row]) {
                        self.walk(h, row, out);
                    }
                }
            }
            (Heads::Int(_), _) => {}
            (Heads::Composite(map), _) => {
                for row in rows {
                    if let Some(&h) = map.get(&composite(keys, row)) {
                        self.walk(h, row, out);
                    }
                }
            }
        }
    }

    fn walk(&self, mut h: u32, probe_row: usize, out: &mut Vec<(usize, usize)>) {
        while h != NIL {
            out.push((h as usize, probe_row));
            h = self.next[h as usize];
        }
    }
}
