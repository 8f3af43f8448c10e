use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flexcomm::bench::{generate, GeneratorConfig};
use flexcomm::graph::parse_edge_list;
use flexcomm::io::{read_cover, read_cover_pair};
use flexcomm::nmi_cover;

fn flexcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flexcomm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = flexcomm(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn json_field(text: &str, key: &str) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    v[key].clone()
}

#[test]
fn detect_is_deterministic_and_replayable() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let args = [
        "detect",
        "--graph",
        "builtin:karate",
        "--seed",
        "7",
        "--iterations",
        "300",
        "--overlap",
        "--format",
        "dot",
        "--out-dir",
        s(&out),
    ];
    ok(&args);
    let first = snapshot(&out);
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "communities.dot",
            "cover.txt",
            "partition.txt",
            "summary.json"
        ]
    );
    ok(&args);
    assert_eq!(snapshot(&out), first);

    ok(&["rerun", s(&out.join("summary.json"))]);
    assert_eq!(snapshot(&out), first);
    ok(&["rerun", s(&out.join("partition.txt"))]);
    assert_eq!(snapshot(&out), first);
}

#[test]
fn every_output_embeds_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&[
        "detect",
        "--graph",
        "builtin:karate",
        "--iterations",
        "50",
        "--overlap",
        "--format",
        "csv",
        "--out-dir",
        s(tmp.path()),
    ]);
    for name in ["partition.txt", "cover.txt", "summary.csv"] {
        let text = std::fs::read_to_string(tmp.path().join(name)).unwrap();
        assert!(text.starts_with("# flexcomm-manifest {"), "{name}");
    }
}

#[test]
fn detect_karate_median_is_two_communities() {
    let mut counts = Vec::new();
    for seed in ["1", "2", "3"] {
        let tmp = tempfile::tempdir().unwrap();
        ok(&[
            "detect",
            "--graph",
            "builtin:karate",
            "--preset",
            "karate",
            "--seed",
            seed,
            "--out-dir",
            s(tmp.path()),
        ]);
        let summary = std::fs::read_to_string(tmp.path().join("summary.json")).unwrap();
        counts.push(
            json_field(&summary, "summary")["communities"]
                .as_u64()
                .unwrap(),
        );
    }
    counts.sort_unstable();
    assert_eq!(counts[1], 2, "{counts:?}");
}

#[test]
fn exit_codes_separate_usage_from_data_errors() {
    let code = |args: &[&str]| flexcomm(args).status.code().unwrap();
    assert_eq!(
        code(&["detect", "--graph", "builtin:karate", "--iterations", "0"]),
        1
    );
    assert_eq!(
        code(&["detect", "--graph", "builtin:karate", "--preset", "nope"]),
        1
    );
    assert_eq!(
        code(&["detect", "--graph", "builtin:karate", "--alpha", "1.5"]),
        1
    );
    assert_eq!(code(&["detect"]), 1);
    assert_eq!(code(&["detect", "--graph", "/definitely/missing.edges"]), 2);

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.edges");
    std::fs::write(&bad, "1 2\n3\n").unwrap();
    assert_eq!(code(&["detect", "--graph", s(&bad)]), 2);

    let cfg = tmp.path().join("zero.toml");
    std::fs::write(&cfg, "iterations = 0\n").unwrap();
    assert_eq!(
        code(&["detect", "--graph", "builtin:karate", "--config", s(&cfg)]),
        1
    );
    std::fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(
        code(&["detect", "--graph", "builtin:karate", "--config", s(&cfg)]),
        1
    );
}

#[test]
fn config_file_sets_parameters_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("params.toml");
    std::fs::write(
        &cfg,
        "preset = \"noise\"\nseed = 5\niterations = 20\ngamma = 3.0\n",
    )
    .unwrap();
    ok(&[
        "detect",
        "--graph",
        "builtin:karate",
        "--config",
        s(&cfg),
        "--gamma",
        "2.5",
        "--out-dir",
        s(tmp.path()),
    ]);
    let summary = std::fs::read_to_string(tmp.path().join("summary.json")).unwrap();
    let job = &json_field(&summary, "manifest")["job"];
    assert_eq!(job["optimizer"]["rng_seed"], 5);
    assert_eq!(job["optimizer"]["max_iterations"], 20);
    assert_eq!(job["flex"]["beta"], 1.0);
    assert_eq!(job["flex"]["gamma"], 2.5);
}

#[test]
fn eval_identity_and_trivial_partitions() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = repo_file("crates/core/data/karate.truth");
    let out = ok(&["eval", "--found", s(&truth), "--truth", s(&truth)]);
    assert_eq!(json_field(&out, "nmi"), 1.0);
    assert_eq!(json_field(&out, "nmi_over"), 1.0);

    let singles = tmp.path().join("singles.txt");
    let whole = tmp.path().join("whole.txt");
    std::fs::write(&singles, "1\n2\n3\n4\n").unwrap();
    std::fs::write(&whole, "1 2 3 4\n").unwrap();
    let out = ok(&[
        "eval",
        "--found",
        s(&singles),
        "--truth",
        s(&whole),
        "--format",
        "csv",
    ]);
    assert_eq!(out, "nmi,nmi_over\n0,0\n");
}

#[test]
fn eval_of_bridge_cover_matches_library() {
    let tmp = tempfile::tempdir().unwrap();
    let cover = tmp.path().join("cover.txt");
    let base = tmp.path().join("base.txt");
    std::fs::write(&cover, "0 1 2 3\n2 3 4 5\n").unwrap();
    std::fs::write(&base, "0 1 2\n3 4 5\n").unwrap();
    let out = ok(&[
        "eval",
        "--found",
        s(&cover),
        "--truth",
        s(&base),
        "--out-dir",
        s(tmp.path()),
    ]);
    let (a, b) = read_cover_pair("0 1 2 3\n2 3 4 5\n", "0 1 2\n3 4 5\n").unwrap();
    let want = nmi_cover(&a, &b).unwrap();
    assert!((json_field(&out, "nmi_over").as_f64().unwrap() - want).abs() < 1e-12);
    assert!(json_field(&out, "nmi").is_null());
    assert!(tmp.path().join("eval.json").exists());
}

#[test]
fn eval_rejects_different_universes() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.txt");
    let b = tmp.path().join("b.txt");
    std::fs::write(&a, "1 2\n3\n").unwrap();
    std::fs::write(&b, "1 2\n").unwrap();
    assert_eq!(
        flexcomm(&["eval", "--found", s(&a), "--truth", s(&b)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn gen_output_reloads_to_the_same_graph() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&[
        "gen",
        "--nodes",
        "100",
        "--mixing",
        "0.3",
        "--seed",
        "9",
        "--name",
        "net",
        "--out-dir",
        s(tmp.path()),
    ]);
    let expected = generate(&GeneratorConfig {
        n_nodes: 100,
        mixing: 0.3,
        rng_seed: 9,
        ..Default::default()
    })
    .unwrap();
    let text = std::fs::read_to_string(tmp.path().join("net.edges")).unwrap();
    let g = parse_edge_list(&text).unwrap().graph;
    assert_eq!(g, expected.graph);
    let truth = read_cover(
        &std::fs::read_to_string(tmp.path().join("net.truth")).unwrap(),
        &g,
    )
    .unwrap();
    assert_eq!(truth, expected.truth);
    assert!(tmp.path().join("net.report.json").exists());
}

#[test]
fn bench_artificial_manifest_writes_one_row_per_run() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = repo_file("manifests/artificial.toml");
    ok(&[
        "bench",
        "--manifest",
        s(&manifest),
        "--repetitions",
        "2",
        "--iterations",
        "5",
        "--out-dir",
        s(tmp.path()),
    ]);
    let text = std::fs::read_to_string(tmp.path().join("bench.csv")).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .unwrap()
        .iter()
        .map(str::to_string)
        .collect();
    assert_eq!(
        header,
        [
            "dataset",
            "objective",
            "repetition",
            "seed",
            "fit",
            "nmi",
            "nmi_over",
            "n_comm",
            "n_over",
            "time_s"
        ]
    );
    let rows = reader.records().count();
    assert_eq!(rows, 8 * 2 * 2);
    let json = std::fs::read_to_string(tmp.path().join("bench.json")).unwrap();
    assert_eq!(
        json_field(&json, "experiments").as_array().unwrap().len(),
        16
    );
}

#[test]
fn export_marks_overlaps_and_colors_communities() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = tmp.path().join("bridge.edges");
    let cover = tmp.path().join("cover.txt");
    std::fs::write(&graph, "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3\n").unwrap();
    std::fs::write(&cover, "0 1 2 3\n2 3 4 5\n").unwrap();
    ok(&[
        "export",
        "--graph",
        s(&graph),
        "--communities",
        s(&cover),
        "--out-dir",
        s(tmp.path()),
    ]);
    let dot = std::fs::read_to_string(tmp.path().join("communities.dot")).unwrap();
    assert!(dot.starts_with("// flexcomm-manifest {"));
    let mut colors: Vec<&str> = dot
        .lines()
        .filter_map(|l| l.split("fillcolor=\"").nth(1))
        .map(|rest| rest.split('"').next().unwrap())
        .collect();
    colors.sort_unstable();
    colors.dedup();
    assert_eq!(colors.len(), 2);
    assert_eq!(dot.matches("shape=doublecircle").count(), 2);
}

#[test]
fn gml_input_is_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("two.gml");
    let mut text = String::from("graph [\n");
    for i in 0..6 {
        text += &format!("  node [ id {i} label \"n{i}\" value {} ]\n", i / 3);
    }
    for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)] {
        text += &format!("  edge [ source {u} target {v} ]\n");
    }
    text += "]\n";
    std::fs::write(&path, text).unwrap();
    let out = ok(&[
        "detect",
        "--graph",
        s(&path),
        "--preset",
        "network-50",
        "--iterations",
        "200",
        "--seed",
        "3",
        "--out-dir",
        s(tmp.path()),
    ]);
    assert!(out.contains("communities 2"), "{out}");
    assert!(out.contains("nmi 1.000000"), "{out}");
}
