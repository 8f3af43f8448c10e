//! Repeated detection runs scored against a reference cover.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fitness::{FlexObjective, FlexParams, ModularityObjective, Objective};
use crate::graph::Graph;
use crate::metrics::{nmi_cover, nmi_disjoint};
use crate::optimizer::{derive_seed, run, Cell, OptimizerConfig};
use crate::overlap::{find_overlaps, OverlapThresholds};
use crate::partition::Cover;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Flex,
    Modularity,
}

impl ObjectiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Flex => "flex",
            ObjectiveKind::Modularity => "modularity",
        }
    }

    pub fn objective(&self, flex: FlexParams) -> Box<dyn Objective> {
        match self {
            ObjectiveKind::Flex => Box::new(FlexObjective(flex)),
            ObjectiveKind::Modularity => Box::new(ModularityObjective),
        }
    }
}

impl std::str::FromStr for ObjectiveKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flex" => Ok(ObjectiveKind::Flex),
            "modularity" => Ok(ObjectiveKind::Modularity),
            other => invalid(format!("unknown objective {other}")),
        }
    }
}

/// One repetition: the optimizer's own objective value, agreement with the
/// reference, and community/overlap counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub repetition: usize,
    pub seed: u64,
    pub fit: f64,
    pub nmi: f64,
    pub nmi_over: f64,
    pub n_communities: usize,
    pub n_overlapping: usize,
    pub time_seconds: f64,
}

/// Means over repetitions plus the raw records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub fit: f64,
    pub nmi: f64,
    pub nmi_over: f64,
    pub n_communities: f64,
    pub n_overlapping: f64,
    pub time_seconds: f64,
    pub runs: Vec<RunRecord>,
}

impl ExperimentResult {
    pub fn from_runs(runs: Vec<RunRecord>) -> ExperimentResult {
        let mean = |f: fn(&RunRecord) -> f64| runs.iter().map(f).sum::<f64>() / runs.len() as f64;
        ExperimentResult {
            fit: mean(|r| r.fit),
            nmi: mean(|r| r.nmi),
            nmi_over: mean(|r| r.nmi_over),
            n_communities: mean(|r| r.n_communities as f64),
            n_overlapping: mean(|r| r.n_overlapping as f64),
            time_seconds: mean(|r| r.time_seconds),
            runs,
        }
    }
}

/// Parameters shared by every repetition of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSetup {
    pub objective: ObjectiveKind,
    pub flex: FlexParams,
    pub thresholds: OverlapThresholds,
    pub optimizer: OptimizerConfig,
}

/// Result of a single detection: best cell and its overlapping cover.
#[derive(Debug, Clone)]
pub struct Detection {
    pub best: Cell,
    pub cover: Cover,
}

/// Optimizes, then applies the overlap heuristic to the best solution.
pub fn detect(g: &Graph, setup: &ExperimentSetup) -> Result<Detection> {
    let objective = setup.objective.objective(setup.flex);
    let outcome = run(g, objective.as_ref(), &setup.optimizer)?;
    let cover = find_overlaps(g, &outcome.best.partition, &setup.thresholds)?;
    Ok(Detection {
        best: outcome.best,
        cover,
    })
}

pub fn run_once(
    g: &Graph,
    truth: &Cover,
    setup: &ExperimentSetup,
    repetition: usize,
) -> Result<RunRecord> {
    let seed = derive_seed(setup.optimizer.rng_seed, &[repetition as u64]);
    let mut rep_setup = setup.clone();
    rep_setup.optimizer.rng_seed = seed;
    let start = Instant::now();
    let found = detect(g, &rep_setup)?;
    let time_seconds = start.elapsed().as_secs_f64();
    Ok(RunRecord {
        repetition,
        seed,
        fit: found.best.fitness,
        nmi: nmi_disjoint(&found.best.partition, &truth.home_partition())?,
        nmi_over: nmi_cover(&found.cover, truth)?,
        n_communities: found.best.partition.community_count(),
        n_overlapping: found.cover.overlap_count(),
        time_seconds,
    })
}

/// Runs `repetitions` independent detections (seeded from the optimizer
/// seed and the repetition index) and aggregates them.
pub fn run_experiment(
    g: &Graph,
    truth: &Cover,
    setup: &ExperimentSetup,
    repetitions: usize,
) -> Result<ExperimentResult> {
    if repetitions == 0 {
        return invalid("repetitions must be at least 1");
    }
    setup.flex.validate()?;
    setup.thresholds.validate()?;
    setup.optimizer.validate()?;
    let runs = (0..repetitions)
        .into_par_iter()
        .map(|rep| run_once(g, truth, setup, rep))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult::from_runs(runs))
}
