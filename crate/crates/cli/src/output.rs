use std::path::Path;

use serde::{Deserialize, Serialize};

use hamclass::model::{CoefficientEntry, InteractionGraph, Model, TrainedClassifier, WeightRange};
use hamclass::train::TrainingReport;

use crate::failure::{require_file, CliResult, Failure};

pub fn write(dir: &Path, name: &str, contents: &str) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure::internal(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::internal(format!("{}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(Failure::internal)?;
    write(dir, name, &(text + "\n"))
}

/// On-disk form of a training run.
#[derive(Serialize)]
pub struct ReportFile<'a> {
    pub config: serde_json::Value,
    pub graph: serde_json::Value,
    pub report: &'a TrainingReport,
}

impl<'a> ReportFile<'a> {
    pub fn new(config: serde_json::Value, graph: &InteractionGraph, report: &'a TrainingReport) -> Self {
        let graph = serde_json::from_str(&graph.to_json()).expect("graph JSON round-trips");
        Self { config, graph, report }
    }
}

#[derive(Deserialize)]
struct SavedReport {
    graph: serde_json::Value,
    report: SavedWeights,
}

#[derive(Deserialize)]
struct SavedWeights {
    weights: Vec<CoefficientEntry>,
    range: WeightRange,
}

/// Rebuilds the trained classifier from a report written by `train` or `color`.
pub fn load_classifier(path: &Path) -> CliResult<TrainedClassifier> {
    require_file(path, "report")?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::user(format!("{}: {e}", path.display())))?;
    let saved: SavedReport =
        serde_json::from_str(&text).map_err(|e| Failure::user(format!("{}: not a report: {e}", path.display())))?;
    let graph = InteractionGraph::from_json(&saved.graph.to_string())?;
    let model = Model::new(graph)?;
    let weights = saved.report.weights.iter().map(|w| w.weight).collect();
    Ok(TrainedClassifier::new(model, weights, saved.report.range)?)
}

/// Human summary of the trained weights.
pub fn weights_table(trained: &TrainedClassifier) -> String {
    let mut s = String::new();
    for (i, e) in trained.entries().iter().enumerate() {
        let site = serde_json::to_string(&e.site).unwrap_or_default();
        s.push_str(&format!("  {i:>3}  {:<12} {:<28} {:+.4}\n", e.label, site, e.weight));
    }
    s
}
