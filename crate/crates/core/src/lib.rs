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

//! An in-memory columnar query engine with predefined, pointer-based joins.
//!
//! Foreign-key joins registered with `PREDEFINE JOIN` materialize the RID
//! of the referenced row in a hidden column. The planner rewrites hash
//! joins over those columns into semijoin-passing variants whose build
//! phase hands exact zone and row bitmasks to scans on the probe side.
//! CSR RID indices allow the same information to flow in reverse, and
//! extended RID indices merge two joins through a relationship table.

pub mod bitmap;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod planner;
pub mod ridindex;
pub mod ridmat;
pub mod session;
pub mod sqlfront;
pub mod storage;

pub use bitmap::Bitmap;
pub use error::{Error, Result};
pub use ridindex::{ExtendedRidIndex, ExtendedRidIndexId, RidIndex, RidIndexId};
pub use ridmat::{JoinId, PredefinedJoin};
pub use storage::{Catalog, DataType, Table, TableId, Value, Vector, ZoneConfig};
pub use exec::{execute, ExecStats, ResultSet};
pub use planner::{AblationFlags, CardMode, LogicalPlan};
pub use session::{Session, SessionConfig, StatementResult};
