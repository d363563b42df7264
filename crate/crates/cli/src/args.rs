use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hamclass::anneal::{AnnealConfig, AnnealSchedule};
use hamclass::model::{Grouping, LayoutMode, SetName, WeightRange};
use hamclass::train::Method;

use crate::failure::{require_file, CliResult, Failure};

#[derive(Debug, Parser)]
#[command(name = "hamclass", version, about = "Ground-space classifier Hamiltonians by simulated annealing")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a classifier on a graph and a labelled dataset.
    Train(TrainArgs),
    /// Evaluate a trained report on every data string.
    Classify(ClassifyArgs),
    /// Red-versus-blue color task on the built-in training colors.
    Color(ColorArgs),
    /// Color task over a grid of Trotter slices and annealing steps.
    Sweep(SweepArgs),
    /// Interaction-set benchmark on the stand-in graphs.
    BenchInteractions(BenchArgs),
    /// Exact diagonalization of a trained Hamiltonian.
    Oracle(OracleArgs),
}

#[derive(Debug, Args, Clone)]
pub struct GraphArgs {
    /// Graph JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub graph: Option<PathBuf>,
    /// Built-in graph: edge, path3, path4, cycle8 (or graph1..graph4).
    #[arg(long)]
    pub preset: Option<String>,
    /// Interaction set used on every edge, overriding the graph file.
    #[arg(long)]
    pub set: Option<SetName>,
    /// Seed for random interaction sets, overriding the graph file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct LayoutArgs {
    /// Control register layout: per-term or qudit.
    #[arg(long, default_value = "per-term")]
    pub mode: LayoutMode,
    /// Qudit grouping: all, edge, chunks:K, sizes:A,B,.. or groups:0,1;2,..
    #[arg(long, default_value = "all")]
    pub group: Grouping,
}

#[derive(Debug, Args, Clone)]
pub struct AnnealArgs {
    /// Annealing steps R.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Trotter slices per step n_T.
    #[arg(long, default_value_t = 30)]
    pub trotter: usize,
    /// Total annealing time τ.
    #[arg(long, default_value_t = 20.0)]
    pub time: f64,
    /// Refuse registers larger than this.
    #[arg(long, default_value_t = hamclass::tensor::DEFAULT_MAX_QUBITS)]
    pub max_qubits: usize,
    /// JSON file overriding some of the driver/data/control curves.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
}

impl AnnealArgs {
    pub fn config(&self) -> CliResult<AnnealConfig> {
        let c = AnnealConfig {
            steps: self.steps,
            trotter: self.trotter,
            total_time: self.time,
            max_qubits: self.max_qubits,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn schedule(&self) -> CliResult<AnnealSchedule> {
        match &self.schedule {
            None => Ok(AnnealSchedule::default()),
            Some(p) => {
                require_file(p, "schedule")?;
                let text = std::fs::read_to_string(p).map_err(|e| Failure::user(format!("{}: {e}", p.display())))?;
                Ok(AnnealSchedule::from_json(&text)?)
            }
        }
    }
}

fn parse_range(s: &str) -> Result<WeightRange, String> {
    WeightRange::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Dataset file, one `<bits> YES|NO` per line.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub layout: LayoutArgs,
    /// Weight range `lo,hi`.
    #[arg(long, default_value = "-1,1", value_parser = parse_range)]
    pub range: WeightRange,
    /// one-shot, serial, exact-lp or projected-oracle.
    #[arg(long, default_value = "one-shot")]
    pub method: Method,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Report JSON written by `train` or `color`.
    #[arg(long)]
    pub report: PathBuf,
    /// Labelled dataset used for the threshold and scores.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct ColorArgs {
    /// Color depth, 6 or 9 bits.
    #[arg(long, default_value_t = 9)]
    pub bits: usize,
    /// Control register layout.
    #[arg(long, default_value = "qudit")]
    pub mode: LayoutMode,
    #[arg(long, default_value = "all")]
    pub group: Grouping,
    #[arg(long, default_value = "-1,1", value_parser = parse_range)]
    pub range: WeightRange,
    #[arg(long, default_value = "one-shot")]
    pub method: Method,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 6)]
    pub bits: usize,
    /// Trotter slice counts.
    #[arg(long = "trotter-grid", value_delimiter = ',', default_values_t = [5usize, 10, 20, 30, 40, 50])]
    pub trotter_grid: Vec<usize>,
    /// Annealing step counts.
    #[arg(long = "steps-grid", value_delimiter = ',', default_values_t = [5usize, 10, 20, 30, 40, 50])]
    pub steps_grid: Vec<usize>,
    #[arg(long, default_value = "qudit")]
    pub mode: LayoutMode,
    #[arg(long, default_value = "all")]
    pub group: Grouping,
    #[arg(long, default_value = "-1,1", value_parser = parse_range)]
    pub range: WeightRange,
    #[arg(long, default_value_t = 20.0)]
    pub time: f64,
    #[arg(long, default_value_t = hamclass::tensor::DEFAULT_MAX_QUBITS)]
    pub max_qubits: usize,
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark graphs, 1 to 4 (3 and 4 take hours at default settings).
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
    pub graphs: Vec<usize>,
    /// Interaction sets; all five by default.
    #[arg(long, value_delimiter = ',')]
    pub sets: Vec<SetName>,
    /// Random balanced labellings per row.
    #[arg(long, default_value_t = 5)]
    pub datasets: usize,
    /// Seed for labellings and random interactions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Training layout: full, compressed, or auto (full up to 16 qubits).
    #[arg(long, default_value = "auto")]
    pub layout: hamclass::eval::BenchLayout,
    /// Only print qubit counts.
    #[arg(long)]
    pub counts_only: bool,
    #[arg(long, default_value = "-1,1", value_parser = parse_range)]
    pub range: WeightRange,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Report JSON with a trained classifier.
    #[arg(long, conflicts_with_all = ["graph", "preset"])]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Coefficients `a,b,..` when no report is given.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Vec<f64>,
    #[arg(long, default_value = "-1,1", value_parser = parse_range)]
    pub range: WeightRange,
    /// Labelled dataset for overlap scores.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Everything needed to reproduce a run; embedded in each output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<SetName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<LayoutMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Grouping>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<WeightRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anneal: Option<AnnealConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<AnnealSchedule>,
    pub out: String,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}

impl RunConfig {
    pub fn new(subcommand: &'static str, out: &std::path::Path) -> Self {
        Self {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            graph: None,
            data: None,
            report: None,
            set: None,
            seed: None,
            mode: None,
            grouping: None,
            range: None,
            method: None,
            anneal: None,
            schedule: None,
            out: out.display().to_string(),
            extra: serde_json::Value::Null,
        }
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
