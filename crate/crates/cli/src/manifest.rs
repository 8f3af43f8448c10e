//! Provenance records embedded in every output file.
//!
//! A manifest holds the fully resolved job, so an output file alone is enough
//! to reproduce it.

use std::path::{Path, PathBuf};

use flexcomm::bench::{BatchManifest, GeneratorConfig, ObjectiveKind};
use flexcomm::{FlexParams, OptimizerConfig, OverlapThresholds};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// Comment-line marker preceding the manifest JSON in text outputs.
pub const MARKER: &str = "flexcomm-manifest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectJob {
    pub graph: String,
    pub truth: Option<PathBuf>,
    pub objective: ObjectiveKind,
    pub flex: FlexParams,
    pub thresholds: OverlapThresholds,
    pub optimizer: OptimizerConfig,
    pub overlap: bool,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalJob {
    pub found: PathBuf,
    pub truth: PathBuf,
    pub graph: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenJob {
    pub generator: GeneratorConfig,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchJob {
    pub batch: BatchManifest,
    /// Directory that relative dataset paths are resolved against.
    pub base: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportJob {
    pub graph: String,
    pub communities: PathBuf,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Job {
    Detect(DetectJob),
    Eval(EvalJob),
    Gen(GenJob),
    Bench(BenchJob),
    Export(ExportJob),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Detect(_) => "detect",
            Job::Eval(_) => "eval",
            Job::Gen(_) => "gen",
            Job::Bench(_) => "bench",
            Job::Export(_) => "export",
        }
    }

    pub fn inputs(&self) -> Vec<String> {
        let show = |p: &Path| p.display().to_string();
        match self {
            Job::Detect(j) => std::iter::once(j.graph.clone())
                .chain(j.truth.as_deref().map(show))
                .collect(),
            Job::Eval(j) => [show(&j.found), show(&j.truth)]
                .into_iter()
                .chain(j.graph.clone())
                .collect(),
            Job::Gen(_) => Vec::new(),
            Job::Bench(j) => vec![show(&j.base)],
            Job::Export(j) => vec![j.graph.clone(), show(&j.communities)],
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Job::Detect(j) => Some(j.optimizer.rng_seed),
            Job::Gen(j) => Some(j.generator.rng_seed),
            Job::Bench(j) => Some(j.batch.optimizer.rng_seed),
            Job::Eval(_) | Job::Export(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub outputs: Vec<PathBuf>,
    pub job: Job,
}

impl RunManifest {
    pub fn new(job: Job, out_dir: &Path, outputs: Vec<PathBuf>) -> RunManifest {
        RunManifest {
            tool: "flexcomm".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: job.name().to_string(),
            inputs: job.inputs(),
            seed: job.seed(),
            out_dir: out_dir.to_path_buf(),
            outputs,
            job,
        }
    }

    /// Single-line form for comment headers.
    pub fn header(&self) -> String {
        format!(
            "{MARKER} {}",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }

    /// Finds the manifest in a text output (comment header) or JSON output
    /// (top-level `manifest` field).
    pub fn extract(text: &str) -> Result<RunManifest, Failure> {
        for line in text.lines() {
            let body = line.trim_start_matches(['#', '/', ' ']);
            if let Some(json) = body.strip_prefix(MARKER) {
                return serde_json::from_str(json.trim())
                    .map_err(|e| Failure::Data(format!("bad manifest: {e}")));
            }
        }
        if let Ok(serde_json::Value::Object(map)) = serde_json::from_str::<serde_json::Value>(text)
        {
            if let Some(m) = map.get("manifest") {
                return serde_json::from_value(m.clone())
                    .map_err(|e| Failure::Data(format!("bad manifest: {e}")));
            }
        }
        Err(Failure::Data("no manifest found".to_string()))
    }
}
