//! Execution of resolved jobs and writing of their artifacts.

use std::path::{Path, PathBuf};

use flexcomm::bench::{self, detect, run_batch, ExperimentSetup, RunRecord};
use flexcomm::io::{read_cover, read_cover_pair, read_graph_file, to_dot, write_communities};
use flexcomm::metrics::{nmi_cover, nmi_disjoint};
use flexcomm::{datasets, flex, graph::write_edge_list, modularity, Cover, Graph};
use serde::Serialize;

use crate::failure::Failure;
use crate::manifest::{BenchJob, DetectJob, EvalJob, ExportJob, Format, GenJob, Job, RunManifest};

/// Loads `builtin:<name>` or a graph file, with any reference cover the
/// source carries.
fn load_graph(source: &str) -> Result<(Graph, Option<Cover>), Failure> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let d = datasets::builtin(name)
            .ok_or_else(|| Failure::Usage(format!("unknown builtin dataset {name}")))?;
        return Ok((d.graph, Some(d.truth)));
    }
    Ok(read_graph_file(Path::new(source))?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn json<T: Serialize>(manifest: &RunManifest, key: &str, value: &T) -> String {
    let mut map = serde_json::Map::new();
    map.insert(
        "manifest".into(),
        serde_json::to_value(manifest).expect("manifest serializes"),
    );
    map.insert(
        key.into(),
        serde_json::to_value(value).expect("record serializes"),
    );
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("json");
    text.push('\n');
    text
}

fn csv_with_header<T: Serialize>(manifest: &RunManifest, rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Failure::Data(e.to_string()))?)
        .expect("csv output is utf-8");
    Ok(format!("# {}\n{body}", manifest.header()))
}

pub fn execute(job: Job, out_dir: Option<&Path>) -> Result<(), Failure> {
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let dir = out_dir.unwrap_or(Path::new("."));
    match &job {
        Job::Detect(j) => run_detect(j, &job, dir),
        Job::Eval(j) => run_eval(j, &job, out_dir),
        Job::Gen(j) => run_gen(j, &job, dir),
        Job::Bench(j) => run_bench(j, &job, dir),
        Job::Export(j) => run_export(j, &job, dir),
    }
}

#[derive(Debug, Serialize)]
struct DetectSummary {
    objective: String,
    fitness: f64,
    flex: f64,
    modularity: Option<f64>,
    communities: usize,
    n_overlapping: usize,
    overlapping: Vec<String>,
    nmi: Option<f64>,
    nmi_over: Option<f64>,
}

fn run_detect(j: &DetectJob, job: &Job, dir: &Path) -> Result<(), Failure> {
    let (g, implied) = load_graph(&j.graph)?;
    let truth = match &j.truth {
        Some(path) => Some(read_cover(&std::fs::read_to_string(path)?, &g)?),
        None => implied,
    };
    let setup = ExperimentSetup {
        objective: j.objective,
        flex: j.flex,
        thresholds: j.thresholds,
        optimizer: j.optimizer.clone(),
    };
    let found = detect(&g, &setup)?;

    let summary_name = match j.format {
        Format::Csv => "summary.csv",
        Format::Json | Format::Dot => "summary.json",
    };
    let mut outputs = vec![PathBuf::from("partition.txt")];
    if j.overlap {
        outputs.push("cover.txt".into());
    }
    outputs.push(summary_name.into());
    if j.format == Format::Dot {
        outputs.push("communities.dot".into());
    }
    let manifest = RunManifest::new(job.clone(), dir, outputs);
    let header = manifest.header();

    let partition = &found.best.partition;
    let cover = if j.overlap {
        found.cover.clone()
    } else {
        Cover::from_partition(partition)
    };
    let summary = DetectSummary {
        objective: j.objective.name().to_string(),
        fitness: found.best.fitness,
        flex: flex(&g, partition, &j.flex)?,
        modularity: modularity(&g, partition).ok(),
        communities: partition.community_count(),
        n_overlapping: cover.overlap_count(),
        overlapping: cover
            .overlapping_nodes()
            .iter()
            .map(|&i| g.label(i).to_string())
            .collect(),
        nmi: match &truth {
            Some(t) => Some(nmi_disjoint(partition, &t.home_partition())?),
            None => None,
        },
        nmi_over: match &truth {
            Some(t) => Some(nmi_cover(&cover, t)?),
            None => None,
        },
    };

    write(
        dir,
        "partition.txt",
        &write_communities(&g, partition.communities(), Some(&header)),
    )?;
    if j.overlap {
        write(
            dir,
            "cover.txt",
            &write_communities(&g, cover.communities(), Some(&header)),
        )?;
    }
    match j.format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                objective: &'a str,
                fitness: f64,
                flex: f64,
                modularity: Option<f64>,
                communities: usize,
                n_overlapping: usize,
                nmi: Option<f64>,
                nmi_over: Option<f64>,
            }
            let row = Row {
                objective: &summary.objective,
                fitness: summary.fitness,
                flex: summary.flex,
                modularity: summary.modularity,
                communities: summary.communities,
                n_overlapping: summary.n_overlapping,
                nmi: summary.nmi,
                nmi_over: summary.nmi_over,
            };
            write(dir, summary_name, &csv_with_header(&manifest, &[row])?)?;
        }
        Format::Json | Format::Dot => {
            write(dir, summary_name, &json(&manifest, "summary", &summary))?
        }
    }
    if j.format == Format::Dot {
        write(dir, "communities.dot", &to_dot(&g, &cover, Some(&header)))?;
    }

    println!(
        "{} {:.6}  communities {}  overlapping {}",
        summary.objective, summary.fitness, summary.communities, summary.n_overlapping
    );
    if let (Some(nmi), Some(over)) = (summary.nmi, summary.nmi_over) {
        println!("nmi {nmi:.6}  nmi_over {over:.6}");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvalReport {
    /// Disjoint NMI; only when neither file has overlapping nodes.
    nmi: Option<f64>,
    nmi_over: f64,
}

fn run_eval(j: &EvalJob, job: &Job, out_dir: Option<&Path>) -> Result<(), Failure> {
    let found_text = std::fs::read_to_string(&j.found)?;
    let truth_text = std::fs::read_to_string(&j.truth)?;
    let (found, truth) = match &j.graph {
        Some(source) => {
            let (g, _) = load_graph(source)?;
            (read_cover(&found_text, &g)?, read_cover(&truth_text, &g)?)
        }
        None => read_cover_pair(&found_text, &truth_text)?,
    };
    let disjoint = found.overlap_count() == 0 && truth.overlap_count() == 0;
    let report = EvalReport {
        nmi: if disjoint {
            Some(nmi_disjoint(
                &found.home_partition(),
                &truth.home_partition(),
            )?)
        } else {
            None
        },
        nmi_over: nmi_cover(&found, &truth)?,
    };
    match j.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("json")),
        Format::Csv => {
            println!("nmi,nmi_over");
            println!(
                "{},{}",
                report.nmi.map(|v| v.to_string()).unwrap_or_default(),
                report.nmi_over
            );
        }
        Format::Dot => return Err(Failure::Usage("eval writes json or csv".into())),
    }
    if let Some(dir) = out_dir {
        let manifest = RunManifest::new(job.clone(), dir, vec!["eval.json".into()]);
        write(dir, "eval.json", &json(&manifest, "eval", &report))?;
    }
    Ok(())
}

fn run_gen(j: &GenJob, job: &Job, dir: &Path) -> Result<(), Failure> {
    let generated = bench::generate(&j.generator)?;
    let edges = format!("{}.edges", j.name);
    let truth = format!("{}.truth", j.name);
    let report = format!("{}.report.json", j.name);
    let manifest = RunManifest::new(
        job.clone(),
        dir,
        vec![
            edges.clone().into(),
            truth.clone().into(),
            report.clone().into(),
        ],
    );
    let header = manifest.header();
    write(
        dir,
        &edges,
        &format!("# {header}\n{}", write_edge_list(&generated.graph)),
    )?;
    write(
        dir,
        &truth,
        &write_communities(
            &generated.graph,
            generated.truth.communities(),
            Some(&header),
        ),
    )?;
    write(dir, &report, &json(&manifest, "report", &generated.report))?;
    let r = &generated.report;
    println!(
        "{} nodes, {} edges, {} communities, mean degree {:.2}, mixing {:.3}, clustering {:.3}",
        generated.graph.node_count(),
        generated.graph.edge_count(),
        r.communities,
        r.mean_degree,
        r.mixing,
        r.mean_clustering
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct BenchRow<'a> {
    dataset: &'a str,
    objective: &'a str,
    repetition: usize,
    seed: u64,
    fit: f64,
    nmi: f64,
    nmi_over: f64,
    n_comm: usize,
    n_over: usize,
    time_s: f64,
}

fn bench_row<'a>(dataset: &'a str, objective: &'a str, r: &RunRecord) -> BenchRow<'a> {
    BenchRow {
        dataset,
        objective,
        repetition: r.repetition,
        seed: r.seed,
        fit: r.fit,
        nmi: r.nmi,
        nmi_over: r.nmi_over,
        n_comm: r.n_communities,
        n_over: r.n_overlapping,
        time_s: r.time_seconds,
    }
}

fn run_bench(j: &BenchJob, job: &Job, dir: &Path) -> Result<(), Failure> {
    let entries = run_batch(&j.batch, &j.base)?;
    let manifest = RunManifest::new(
        job.clone(),
        dir,
        vec!["bench.json".into(), "bench.csv".into()],
    );
    let rows: Vec<BenchRow> = entries
        .iter()
        .flat_map(|e| {
            e.result
                .runs
                .iter()
                .map(move |r| bench_row(&e.dataset, e.objective.name(), r))
        })
        .collect();
    write(dir, "bench.json", &json(&manifest, "experiments", &entries))?;
    write(dir, "bench.csv", &csv_with_header(&manifest, &rows)?)?;
    println!(
        "{:<20} {:<11} {:>7} {:>7} {:>9} {:>7} {:>7} {:>8}",
        "dataset", "objective", "fit", "nmi", "nmi_over", "n_comm", "n_over", "time_s"
    );
    for e in &entries {
        let r = &e.result;
        println!(
            "{:<20} {:<11} {:>7.3} {:>7.3} {:>9.3} {:>7.2} {:>7.2} {:>8.3}",
            e.dataset,
            e.objective.name(),
            r.fit,
            r.nmi,
            r.nmi_over,
            r.n_communities,
            r.n_overlapping,
            r.time_seconds
        );
    }
    Ok(())
}

fn run_export(j: &ExportJob, job: &Job, dir: &Path) -> Result<(), Failure> {
    let (g, _) = load_graph(&j.graph)?;
    let cover = read_cover(&std::fs::read_to_string(&j.communities)?, &g)?;
    let name = format!("{}.dot", j.name);
    let manifest = RunManifest::new(job.clone(), dir, vec![name.clone().into()]);
    write(dir, &name, &to_dot(&g, &cover, Some(&manifest.header())))?;
    Ok(())
}
