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

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use predjoin_bench::report::Format;
use predjoin_bench::MicroKind;
use predjoin_core::{AblationFlags, CardMode};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "predjoin", version, about = "Predefined joins over a columnar engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a statement script, printing each query result as CSV.
    Run(ScriptArgs),
    /// Run the DDL of a script and print every query's plan before and after rewriting.
    Explain(ScriptArgs),
    /// Selectivity sweep over a one-hop Person-Knows-Person query.
    BenchMicro(MicroArgs),
    /// Every shipped ablation query under the four optimization presets.
    BenchAblation(BenchArgs),
    /// Every join order of the shipped four-relation queries, as generated and rewritten.
    BenchSpectrum(SpectrumArgs),
    /// Write a synthetic social database as CSV files plus a load script.
    GenData(GenArgs),
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Rows per zone.
    #[arg(long, default_value_t = 1024)]
    pub zone_size: usize,
    /// Cardinalities for join ordering: exact, estimate or file=PATH.
    #[arg(long, default_value = "exact")]
    pub cards: String,
    /// Disable RID materialization and everything built on it.
    #[arg(long)]
    pub no_rid_mat: bool,
    /// Disable reverse semijoins, and with them join merging.
    #[arg(long)]
    pub no_rsj: bool,
    /// Disable join merging.
    #[arg(long)]
    pub no_jm: bool,
}

impl EngineArgs {
    /// Each flag switches off the techniques that depend on it too.
    pub fn flags(&self) -> AblationFlags {
        let rid_mat = !self.no_rid_mat;
        let rsj = rid_mat && !self.no_rsj;
        let jm = rsj && !self.no_jm;
        AblationFlags::new(rid_mat, rsj, jm).expect("normalized flags are consistent")
    }

    pub fn cards(&self) -> Result<CardMode, CliError> {
        match self.cards.as_str() {
            "exact" => Ok(CardMode::Exact),
            "estimate" => Ok(CardMode::Estimate),
            other => match other.strip_prefix("file=") {
                Some(path) => Ok(CardMode::from_json_file(path.as_ref())?),
                None => Err(CliError::User(format!(
                    "invalid --cards '{other}', expected exact, estimate or file=PATH"
                ))),
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct ScriptArgs {
    /// Script of `;`-terminated statements.
    #[arg(long, conflicts_with = "statement")]
    pub script: Option<PathBuf>,
    /// Inline statements, used when no script is given.
    #[arg(required_unless_present = "script")]
    pub statement: Option<String>,
    /// Write execution counters of every query as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n_person: usize,
    #[arg(long, default_value_t = 50.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 2)]
    pub comments_per_person: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 1024)]
    pub zone_size: usize,
    /// Timed runs per measurement, after one warm-up.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MicroArgs {
    /// Which side carries the swept predicate.
    #[arg(long, value_enum, default_value_t = Side::Person)]
    pub which: Side,
    #[command(flatten)]
    pub bench: BenchArgs,
    /// Render wall time against selectivity as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub bench: BenchArgs,
    /// Enumerate at most this many plans per query.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Run only the named shipped query.
    #[arg(long)]
    pub query: Option<String>,
    /// Render the wall-time CDF as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    /// MICRO-P: sweep the Person predicate.
    Person,
    /// MICRO-K: sweep the Knows predicate.
    Knows,
}

impl Side {
    pub fn kind(self) -> MicroKind {
        match self {
            Side::Person => MicroKind::P,
            Side::Knows => MicroKind::K,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}
