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

//! Small fixed databases used by tests, examples and the CLI.

use crate::storage::{Catalog, DataType};

pub const PERSON_CSV: &str = "101,Mahinda\n202,Karim\n303,Carmen\n404,Zhang\n";
pub const FOLLOWS_CSV: &str = "101,202,2021\n303,404,2019\n101,303,2021\n202,303,2020\n101,404,2021\n";

/// The four-person `Person`/`Follows` database, loaded but with no joins predefined.
pub fn running_example() -> Catalog {
    let mut cat = Catalog::new();
    let p = cat
        .create_table("Person", &[("ID", DataType::Int64), ("name", DataType::Str)])
        .expect("fresh catalog");
    cat.load_csv(p, PERSON_CSV.as_bytes(), false).expect("valid fixture");
    let f = cat
        .create_table(
            "Follows",
            &[("ID1", DataType::Int64), ("ID2", DataType::Int64), ("year", DataType::Int64)],
        )
        .expect("fresh catalog");
    cat.load_csv(f, FOLLOWS_CSV.as_bytes(), false).expect("valid fixture");
    cat
}

/// Two-hop friends-of-Karim query over the running example.
pub const TWO_HOP_QUERY: &str = "SELECT * FROM Person P1, Follows F1, Person P2, Follows F2, Person P3 \
WHERE P1.ID = F1.ID1 AND F1.ID2 = P2.ID AND P2.ID = F2.ID1 AND F2.ID2 = P3.ID AND P1.name = 'Karim'";

/// The same query with every `Follows` column projected out.
pub const TWO_HOP_NAMES_QUERY: &str = "SELECT P1.name, P2.name, P3.name FROM Person P1, Follows F1, Person P2, Follows F2, Person P3 \
WHERE P1.ID = F1.ID1 AND F1.ID2 = P2.ID AND P2.ID = F2.ID1 AND F2.ID2 = P3.ID AND P1.name = 'Karim'";
