//! End-to-end checks of the command-line surface: every subcommand, file
//! format, and JSON emission.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gnncap"))
}

fn write_c6(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("c6.graph");
    let mut text = String::from("graph n=6\n");
    for v in 0..6 {
        text.push_str(&format!("node {v}\n"));
    }
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)] {
        text.push_str(&format!("edge {a} {b} /\n"));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn run_json(cmd: &mut Command) -> serde_json::Value {
    let out = cmd.output().expect("spawn gnncap");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_diameter_and_k_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_c6(dir.path());
    let json = run_json(bin().args([
        "verify",
        "--problem",
        "diameter",
        "--graph",
        graph.to_str().unwrap(),
    ]));
    assert_eq!(json["value"], 3);
    let json = run_json(bin().args([
        "verify",
        "--problem",
        "k_cycle",
        "--k",
        "6",
        "--graph",
        graph.to_str().unwrap(),
    ]));
    assert_eq!(json["value"], true);
}

#[test]
fn verify_subgraph_predicate_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_c6(dir.path());
    let sub = dir.path().join("h.sub");
    std::fs::write(&sub, "edge 0 1\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 5\n").unwrap();
    let json = run_json(bin().args([
        "verify",
        "--problem",
        "simple_path",
        "--graph",
        graph.to_str().unwrap(),
        "--subgraph",
        sub.to_str().unwrap(),
    ]));
    assert_eq!(json["value"], true);
}

#[test]
fn simulate_union_emits_transcript_schema() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_c6(dir.path());
    let cut = dir.path().join("cut.txt");
    std::fs::write(&cut, "0 1 2\n").unwrap();
    let out = dir.path().join("transcript.json");
    let status = bin()
        .args([
            "simulate",
            "--graph",
            graph.to_str().unwrap(),
            "--alg",
            "union",
            "--rounds",
            "3",
            "--cut",
            cut.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(t["rounds"], 3);
    assert_eq!(t["states"].as_array().unwrap().len(), 4);
    // 2|E| + n = 18 directed messages per round, rounds 0..=3.
    assert_eq!(t["messages"].as_array().unwrap().len(), 4);
    assert_eq!(t["messages"][0].as_array().unwrap().len(), 18);
    assert!(t["cut_traffic"]["total"].as_u64().unwrap() > 0);
    assert_eq!(t["cut_traffic"]["crossing_edges"], 2);
}

#[test]
fn simulate_bandwidth_violation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_c6(dir.path());
    let out = dir.path().join("t.json");
    let result = bin()
        .args([
            "simulate",
            "--graph",
            graph.to_str().unwrap(),
            "--alg",
            "union",
            "--rounds",
            "2",
            "--bandwidth",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("bandwidth violation"));
}

#[test]
fn gnn_run_union_reconstruction_readout() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_c6(dir.path());
    let spec = dir.path().join("net.spec");
    std::fs::write(&spec, "net union rounds=1\nreadout diameter\n").unwrap();
    let out = dir.path().join("trace.json");
    let status = bin()
        .args([
            "gnn-run",
            "--graph",
            graph.to_str().unwrap(),
            "--network",
            spec.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(t["readout"][0], "3");
    assert!(t["width"].as_u64().unwrap() >= 1);
}

#[test]
fn generate_verify_family_and_dataset_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds_dir = dir.path().join("ds");
    let out = bin()
        .args([
            "generate",
            "--family",
            "cycle",
            "--p",
            "4",
            "--count",
            "10",
            "--seed",
            "9",
            "--out",
            ds_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let labels = std::fs::read_to_string(ds_dir.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 11); // header + 10 rows
    assert!(ds_dir.join("g00000.graph").exists());
    assert!(ds_dir.join("stats.json").exists());

    let report = run_json(bin().args([
        "verify-family",
        "--family",
        "diameter",
        "--q",
        "4",
        "--limit",
        "4",
    ]));
    assert_eq!(report["instances"], 256);
    assert_eq!(report["counterexamples"].as_array().unwrap().len(), 0);
}

#[test]
fn train_writes_run_json_and_trained_net_runs() {
    let dir = tempfile::tempdir().unwrap();
    let ds_dir = dir.path().join("ds");
    assert!(bin()
        .args([
            "generate", "--family", "cycle", "--p", "4", "--count", "12", "--seed", "3", "--out",
            ds_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let cfg = dir.path().join("train.cfg");
    std::fs::write(&cfg, "epochs=3\nbatch=4\n").unwrap();
    let run = dir.path().join("run.json");
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "train",
            "--dataset",
            ds_dir.to_str().unwrap(),
            "--depth",
            "2",
            "--width",
            "3",
            "--scheme",
            "unique_id",
            "--out",
            run.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&run).unwrap()).unwrap();
    assert_eq!(run_json["curves"].as_array().unwrap().len(), 3);
    assert!(run_json["params"].as_array().unwrap().len() > 0);

    // Execute the trained parameters through gnn-run on one dataset graph
    // re-attributed with the same scheme dimensions.
    let g = gnncap_core::format::parse(
        &std::fs::read_to_string(ds_dir.join("g00000.graph")).unwrap(),
    )
    .unwrap();
    let scheme = gnncap_train::AttributeScheme::sized_for(
        gnncap_train::SchemeKind::UniqueIdOneHot,
        8,
        7,
    );
    let attributed = gnncap_train::assign_attributes(&g, &scheme, 0).unwrap();
    let gfile = dir.path().join("attributed.graph");
    std::fs::write(&gfile, gnncap_core::format::serialize(&attributed)).unwrap();
    let spec = dir.path().join("trained.spec");
    std::fs::write(
        &spec,
        format!("net trained file={}\n", run.to_str().unwrap()),
    )
    .unwrap();
    let trace = dir.path().join("trace.json");
    let out = bin()
        .args([
            "gnn-run",
            "--graph",
            gfile.to_str().unwrap(),
            "--network",
            spec.to_str().unwrap(),
            "--out",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["kind"], "trained");
    assert_eq!(t["logits"].as_array().unwrap().len(), 2);
}

#[test]
fn grid_and_analyze_over_a_tiny_store() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = dir.path().join("grid.cfg");
    std::fs::write(
        &cfg,
        "p_list=3\nwidths=2\ndepths=1\nrestarts=2\ntrain_size=8\ntest_size=4\nepochs=2\nschemes=anonymous\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "grid",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 3); // header + 2 restarts
    assert!(results.lines().next().unwrap().starts_with("n,p,d,w,scheme"));

    let out = bin()
        .args([
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "analyze",
            "--what",
            "critical",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
}
