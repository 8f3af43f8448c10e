//! Benchmark graphs, repeated experiments and batch execution.

mod experiment;
mod generator;
mod presets;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use experiment::{
    detect, run_experiment, run_once, Detection, ExperimentResult, ExperimentSetup, ObjectiveKind,
    RunRecord,
};
pub use generator::{generate, measure, Generated, GeneratorConfig, GeneratorReport};
pub use presets::{preset, Preset, PRESETS};

use crate::datasets;
use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::io::{read_cover, read_graph_file};
use crate::optimizer::OptimizerConfig;
use crate::partition::Cover;

/// Where a batch dataset comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    Builtin {
        dataset: String,
    },
    Generated {
        generator: GeneratorConfig,
    },
    /// Edge list or GML; without `truth`, GML node values give the classes.
    Files {
        graph: PathBuf,
        #[serde(default)]
        truth: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub name: String,
    /// Parameter row from [`PRESETS`].
    pub preset: String,
    #[serde(flatten)]
    pub source: DatasetSource,
}

fn default_objectives() -> Vec<ObjectiveKind> {
    vec![ObjectiveKind::Flex, ObjectiveKind::Modularity]
}

fn default_repetitions() -> usize {
    20
}

/// A batch of experiments: every dataset crossed with every objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchManifest {
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_objectives")]
    pub objectives: Vec<ObjectiveKind>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub datasets: Vec<DatasetEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchEntry {
    pub dataset: String,
    pub objective: ObjectiveKind,
    pub setup: ExperimentSetup,
    pub generator: Option<GeneratorReport>,
    pub result: ExperimentResult,
}

/// Resolves a dataset to a graph, its reference cover and, for generated
/// data, the generator report. Relative file paths are taken from `base`.
pub fn load_dataset(
    source: &DatasetSource,
    base: &Path,
) -> Result<(Graph, Cover, Option<GeneratorReport>)> {
    match source {
        DatasetSource::Builtin { dataset } => match datasets::builtin(dataset) {
            Some(d) => Ok((d.graph, d.truth, None)),
            None => invalid(format!("unknown builtin dataset {dataset}")),
        },
        DatasetSource::Generated { generator } => {
            let out = generate(generator)?;
            Ok((out.graph, out.truth, Some(out.report)))
        }
        DatasetSource::Files { graph, truth } => {
            let (g, classes) = read_graph_file(&base.join(graph))?;
            let t = match (truth, classes) {
                (Some(path), _) => read_cover(&std::fs::read_to_string(base.join(path))?, &g)?,
                (None, Some(classes)) => classes,
                (None, None) => return invalid(format!("{} needs a truth file", graph.display())),
            };
            Ok((g, t, None))
        }
    }
}

pub fn run_batch(manifest: &BatchManifest, base: &Path) -> Result<Vec<BatchEntry>> {
    if manifest.repetitions == 0 {
        return invalid("repetitions must be at least 1");
    }
    let mut out = Vec::new();
    for entry in &manifest.datasets {
        let row = preset(&entry.preset)?;
        let (g, truth, report) = load_dataset(&entry.source, base)?;
        for &objective in &manifest.objectives {
            let setup = ExperimentSetup {
                objective,
                flex: row.flex,
                thresholds: row.thresholds,
                optimizer: manifest.optimizer.clone(),
            };
            log::info!(
                "{} / {}: {} repetitions",
                entry.name,
                objective.name(),
                manifest.repetitions
            );
            let result = run_experiment(&g, &truth, &setup, manifest.repetitions)?;
            out.push(BatchEntry {
                dataset: entry.name.clone(),
                objective,
                setup,
                generator: report.clone(),
                result,
            });
        }
    }
    Ok(out)
}

/// The eight artificial networks: 50/100/200/500 nodes at mixing 0.1 and
/// 0.3, each with its parameter row.
pub fn artificial_suite(
    repetitions: usize,
    optimizer: OptimizerConfig,
    seed: u64,
) -> BatchManifest {
    let mut datasets = Vec::new();
    for (mixing, label) in [(0.1, "network"), (0.3, "noise-network")] {
        for n in [50usize, 100, 200, 500] {
            let preset = match (mixing > 0.2, n) {
                (true, _) => "noise",
                (false, 50) => "network-50",
                (false, _) => "network-100-500",
            };
            datasets.push(DatasetEntry {
                name: format!("{label}-{n}"),
                preset: preset.to_string(),
                source: DatasetSource::Generated {
                    generator: GeneratorConfig {
                        n_nodes: n,
                        mixing,
                        rng_seed: crate::optimizer::derive_seed(
                            seed,
                            &[n as u64, (mixing * 10.0) as u64],
                        ),
                        ..Default::default()
                    },
                },
            });
        }
    }
    BatchManifest {
        repetitions,
        objectives: default_objectives(),
        optimizer,
        datasets,
    }
}
