//! `flexcomm`: community detection, scoring, generation, benchmarking and
//! export from the command line.

mod commands;
mod failure;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flexcomm::bench::{artificial_suite, preset, BatchManifest, GeneratorConfig, ObjectiveKind};
use flexcomm::{OptimizerConfig, TripleScope};
use serde::Deserialize;

use crate::failure::Failure;
use crate::manifest::{BenchJob, DetectJob, EvalJob, ExportJob, Format, GenJob, Job, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "flexcomm",
    version,
    about = "Flex community detection with an immune-network optimizer"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize a partition of a graph and optionally add overlapping nodes.
    Detect(DetectArgs),
    /// Score a community file against a reference.
    Eval(EvalArgs),
    /// Generate a benchmark network with a planted cover.
    Gen(GenArgs),
    /// Run a batch of repeated experiments.
    Bench(BenchArgs),
    /// Render a graph and its communities as DOT.
    Export(ExportArgs),
    /// Repeat the run recorded in an output file's manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Objective {
    Flex,
    Modularity,
}

impl From<Objective> for ObjectiveKind {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Flex => ObjectiveKind::Flex,
            Objective::Modularity => ObjectiveKind::Modularity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Triples {
    Centered,
    AnyPosition,
}

impl From<Triples> for TripleScope {
    fn from(t: Triples) -> Self {
        match t {
            Triples::Centered => TripleScope::Centered,
            Triples::AnyPosition => TripleScope::AnyPosition,
        }
    }
}

/// Optimizer settings; unset flags keep the config-file or default value.
#[derive(Debug, Clone, Default, Args)]
struct OptimizerArgs {
    /// Optimizer iterations [default: 1500].
    #[arg(long)]
    iterations: Option<usize>,
    /// Master random seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Suppression similarity threshold [default: 0.2].
    #[arg(long)]
    sigma_s: Option<f64>,
    /// Mutation intensity at the first iteration [default: 10].
    #[arg(long)]
    alpha_ini: Option<f64>,
    /// Mutation intensity at the last iteration [default: 1].
    #[arg(long)]
    alpha_end: Option<f64>,
    /// [default: 4]
    #[arg(long)]
    initial_population: Option<usize>,
    /// [default: 6]
    #[arg(long)]
    max_population: Option<usize>,
    /// Clones of a cell at full concentration [default: 4].
    #[arg(long)]
    clones_per_cell: Option<usize>,
    /// [default: 0.3]
    #[arg(long)]
    suppression_rate: Option<f64>,
    /// [default: 0.1]
    #[arg(long)]
    concentration_gain: Option<f64>,
    /// Do not refill the population with random cells.
    #[arg(long)]
    no_insertion: bool,
}

/// Keys accepted in a `--config` file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    objective: Option<ObjectiveKind>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    triples: Option<TripleScope>,
    thr_tri: Option<f64>,
    thr_nbr: Option<f64>,
    thr_shared: Option<f64>,
    overlap: Option<bool>,
    #[serde(alias = "iterations")]
    max_iterations: Option<usize>,
    #[serde(alias = "seed")]
    rng_seed: Option<u64>,
    sigma_s: Option<f64>,
    alpha_ini: Option<f64>,
    alpha_end: Option<f64>,
    initial_population: Option<usize>,
    max_population: Option<usize>,
    clones_per_cell: Option<usize>,
    suppression_rate: Option<f64>,
    concentration_gain: Option<f64>,
    insert_cells: Option<bool>,
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn set<T>(slot: &mut T, values: [Option<T>; 2]) {
    for v in values.into_iter().flatten() {
        *slot = v;
    }
}

impl OptimizerArgs {
    fn resolve(&self, file: &ConfigFile) -> Result<OptimizerConfig, Failure> {
        let mut c = OptimizerConfig::default();
        set(
            &mut c.max_iterations,
            [file.max_iterations, self.iterations],
        );
        set(&mut c.rng_seed, [file.rng_seed, self.seed]);
        set(&mut c.sigma_s, [file.sigma_s, self.sigma_s]);
        set(&mut c.alpha_ini, [file.alpha_ini, self.alpha_ini]);
        set(&mut c.alpha_end, [file.alpha_end, self.alpha_end]);
        set(
            &mut c.initial_population,
            [file.initial_population, self.initial_population],
        );
        set(
            &mut c.max_population,
            [file.max_population, self.max_population],
        );
        set(
            &mut c.clones_per_cell,
            [file.clones_per_cell, self.clones_per_cell],
        );
        set(
            &mut c.suppression_rate,
            [file.suppression_rate, self.suppression_rate],
        );
        set(
            &mut c.concentration_gain,
            [file.concentration_gain, self.concentration_gain],
        );
        set(
            &mut c.insert_cells,
            [file.insert_cells, self.no_insertion.then_some(false)],
        );
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Edge list or `.gml` file, or `builtin:karate`.
    #[arg(long)]
    graph: String,
    /// Reference community file; adds NMI scores to the summary.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Named parameter row (karate, network-50, network-100-500, krebs, noise, football, dolphins).
    #[arg(long)]
    preset: Option<String>,
    /// TOML file with any of the parameter keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    objective: Option<Objective>,
    /// Triangle versus neighbor weight [default: 0.8].
    #[arg(long)]
    alpha: Option<f64>,
    /// Open-triangle penalty [default: 0.3].
    #[arg(long)]
    beta: Option<f64>,
    /// Size-penalty exponent [default: 2].
    #[arg(long)]
    gamma: Option<f64>,
    /// Which open triples count against a node [default: centered].
    #[arg(long, value_enum)]
    triples: Option<Triples>,
    /// [default: 0.3]
    #[arg(long)]
    thr_tri: Option<f64>,
    /// [default: 0.6]
    #[arg(long)]
    thr_nbr: Option<f64>,
    /// [default: 0.25]
    #[arg(long)]
    thr_shared: Option<f64>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Also write the overlapping cover.
    #[arg(long)]
    overlap: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Summary format; `dot` also writes a rendering.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl DetectArgs {
    fn job(&self) -> Result<DetectJob, Failure> {
        let file = read_config(self.config.as_deref())?;
        let row = preset(
            self.preset
                .as_deref()
                .or(file.preset.as_deref())
                .unwrap_or("karate"),
        )?;
        let mut flex = row.flex;
        set(&mut flex.alpha, [file.alpha, self.alpha]);
        set(&mut flex.beta, [file.beta, self.beta]);
        set(&mut flex.gamma, [file.gamma, self.gamma]);
        set(
            &mut flex.triples,
            [file.triples, self.triples.map(Into::into)],
        );
        flex.validate()?;
        let mut th = row.thresholds;
        set(&mut th.thr_tri, [file.thr_tri, self.thr_tri]);
        set(&mut th.thr_nbr, [file.thr_nbr, self.thr_nbr]);
        set(&mut th.thr_shared, [file.thr_shared, self.thr_shared]);
        th.validate()?;
        let mut objective = ObjectiveKind::Flex;
        set(
            &mut objective,
            [file.objective, self.objective.map(Into::into)],
        );
        Ok(DetectJob {
            graph: self.graph.clone(),
            truth: self.truth.clone(),
            objective,
            flex,
            thresholds: th,
            optimizer: self.optimizer.resolve(&file)?,
            overlap: self.overlap || file.overlap.unwrap_or(false),
            format: self.format,
        })
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Community file to score.
    #[arg(long)]
    found: PathBuf,
    /// Reference community file.
    #[arg(long)]
    truth: PathBuf,
    /// Graph whose labels both files use; without it the files must list
    /// the same labels.
    #[arg(long)]
    graph: Option<String>,
    /// Also write the report here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// TOML file with generator keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// [default: 50]
    #[arg(long)]
    nodes: Option<usize>,
    /// [default: 10]
    #[arg(long)]
    avg_degree: Option<f64>,
    /// [default: 15]
    #[arg(long)]
    max_degree: Option<usize>,
    /// [default: 10]
    #[arg(long)]
    max_communities: Option<usize>,
    /// Fraction of edges leaving their community [default: 0.1].
    #[arg(long)]
    mixing: Option<f64>,
    /// [default: 3]
    #[arg(long)]
    overlap_nodes: Option<usize>,
    /// Mean communities per overlapping node [default: 2].
    #[arg(long)]
    avg_memberships: Option<f64>,
    /// Best-effort mean clustering coefficient [default: 0.7].
    #[arg(long)]
    clustering: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output file stem.
    #[arg(long, default_value = "network")]
    name: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl GenArgs {
    fn job(&self) -> Result<GenJob, Failure> {
        let mut g: GeneratorConfig = match &self.config {
            Some(path) => toml::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
            None => GeneratorConfig::default(),
        };
        set(&mut g.n_nodes, [self.nodes, None]);
        set(&mut g.avg_degree, [self.avg_degree, None]);
        set(&mut g.max_degree, [self.max_degree, None]);
        set(&mut g.max_communities, [self.max_communities, None]);
        set(&mut g.mixing, [self.mixing, None]);
        set(&mut g.n_overlap_nodes, [self.overlap_nodes, None]);
        set(&mut g.avg_memberships, [self.avg_memberships, None]);
        set(&mut g.target_clustering, [self.clustering, None]);
        set(&mut g.rng_seed, [self.seed, None]);
        g.validate()?;
        Ok(GenJob {
            generator: g,
            name: self.name.clone(),
        })
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// TOML batch manifest.
    #[arg(long, conflicts_with = "suite", required_unless_present = "suite")]
    manifest: Option<PathBuf>,
    /// Built-in batch: `artificial` (eight generated networks).
    #[arg(long)]
    suite: Option<String>,
    /// Override the repetition count.
    #[arg(long)]
    repetitions: Option<usize>,
    /// Override optimizer iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl BenchArgs {
    fn job(&self) -> Result<BenchJob, Failure> {
        let (mut batch, base) = match (&self.manifest, self.suite.as_deref()) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)?;
                let batch: BatchManifest = toml::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (batch, base)
            }
            (None, Some("artificial")) => (
                artificial_suite(20, OptimizerConfig::default(), self.seed.unwrap_or(0)),
                PathBuf::new(),
            ),
            (None, Some(other)) => return Err(Failure::Usage(format!("unknown suite {other}"))),
            (None, None) => return Err(Failure::Usage("need --manifest or --suite".into())),
        };
        set(&mut batch.repetitions, [self.repetitions, None]);
        set(&mut batch.optimizer.max_iterations, [self.iterations, None]);
        set(&mut batch.optimizer.rng_seed, [self.seed, None]);
        if batch.repetitions == 0 {
            return Err(Failure::Usage("repetitions must be at least 1".into()));
        }
        batch.optimizer.validate()?;
        Ok(BenchJob { batch, base })
    }
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Edge list or `.gml` file, or `builtin:karate`.
    #[arg(long)]
    graph: String,
    /// Community file (partition or cover).
    #[arg(long)]
    communities: PathBuf,
    /// Output file stem.
    #[arg(long, default_value = "communities")]
    name: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Only `dot` is supported.
    #[arg(long, value_enum, default_value = "dot")]
    format: Format,
}

#[derive(Debug, Args)]
struct RerunArgs {
    /// Any file written by flexcomm.
    file: PathBuf,
    /// Write outputs here instead of the recorded directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn dispatch(command: Command) -> Result<(), Failure> {
    let (job, out_dir) = match command {
        Command::Detect(a) => (Job::Detect(a.job()?), Some(a.out_dir)),
        Command::Eval(a) => (
            Job::Eval(EvalJob {
                found: a.found,
                truth: a.truth,
                graph: a.graph,
                format: a.format,
            }),
            a.out_dir,
        ),
        Command::Gen(a) => (Job::Gen(a.job()?), Some(a.out_dir)),
        Command::Bench(a) => (Job::Bench(a.job()?), Some(a.out_dir)),
        Command::Export(a) => {
            if a.format != Format::Dot {
                return Err(Failure::Usage("export only writes dot".into()));
            }
            (
                Job::Export(ExportJob {
                    graph: a.graph,
                    communities: a.communities,
                    name: a.name,
                }),
                Some(a.out_dir),
            )
        }
        Command::Rerun(a) => {
            let recorded = RunManifest::extract(&std::fs::read_to_string(&a.file)?)?;
            let out_dir = a.out_dir.unwrap_or(recorded.out_dir);
            (recorded.job, Some(out_dir))
        }
    };
    commands::execute(job, out_dir.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("flexcomm: {f}");
            f.exit_code()
        }
    }
}
