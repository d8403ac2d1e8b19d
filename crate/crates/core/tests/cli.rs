use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcube"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn verify_paper4_small_dims() {
    for n in ["3", "4", "5"] {
        let o = qcube(&["verify", "--n", n, "--induced"]);
        assert_eq!(o.status.code(), Some(0), "n={n}");
        let v = json(&o);
        assert_eq!(v["witness_found"], false);
        assert_eq!(v["palette"], 4);
        assert_eq!(v["results"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn verify_reports_witness_with_exit_one() {
    let o = qcube(&["verify", "--n", "3", "--coloring", "constant", "--lengths", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let w = v["results"][0]["witness"].as_array().unwrap();
    assert_eq!(w.len(), 4);
    assert_eq!(w[0], "000");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--n", "5", "--lengths", "5"][..],
        &["verify", "--n", "0"],
        &["verify", "--n", "5", "--coloring", "rainbow"],
        &["enumerate", "--n", "3", "--length", "4", "--coloring", "paper4"],
        &["matrix-scan", "--drop-filter", "z"],
        &["bounds", "--n", "4", "--random", "p=2"],
        &["frobnicate"],
    ] {
        let o = qcube(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn guard_exit_three_and_force() {
    let o = qcube(&["verify", "--n", "11", "--lengths", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qcube(&["enumerate", "--n", "11", "--length", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qcube(&["verify", "--n", "11", "--lengths", "4", "--force", "--induced"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
}

#[test]
fn enumerate_counts_and_layer() {
    let v = json(&qcube(&["enumerate", "--n", "3", "--length", "6"]));
    assert_eq!(v["count"], 16);
    let v = json(&qcube(&["enumerate", "--n", "3", "--length", "6", "--induced"]));
    assert_eq!(v["count"], 4);
    let v = json(&qcube(&["enumerate", "--n", "3", "--length", "6", "--layer", "1"]));
    assert_eq!(v["count"], 1);
    assert_eq!(
        v["witness"],
        serde_json::json!(["001", "011", "010", "110", "100", "101"])
    );
    let pruned = json(&qcube(&["enumerate", "--n", "4", "--length", "8", "--induced"]));
    let lazy = json(&qcube(&["enumerate", "--n", "4", "--length", "8", "--induced", "--no-prune"]));
    assert_eq!(pruned["count"], lazy["count"]);
    assert_eq!(pruned["witness"], lazy["witness"]);
}

#[test]
fn enumerate_single_color_class() {
    let v = json(&qcube(&[
        "enumerate", "--n", "4", "--length", "4", "--coloring", "paper4", "--color", "0",
    ]));
    assert_eq!(v["count"], 0);
    assert_eq!(v["coloring"], "paper4");
}

#[test]
fn coloring_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q4.col");
    let p = path.to_str().unwrap();
    let o = qcube(&["color", "--n", "4", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["total_edges"], 32);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("qcube-coloring n=4 palette=4\n"));
    assert_eq!(text.lines().count(), 33);

    let spec = format!("file:{p}");
    let from_file = json(&qcube(&["verify", "--n", "4", "--coloring", &spec, "--induced"]));
    let builtin = json(&qcube(&["verify", "--n", "4", "--induced"]));
    assert_eq!(from_file["witness_found"], false);
    for (a, b) in from_file["results"]
        .as_array()
        .unwrap()
        .iter()
        .zip(builtin["results"].as_array().unwrap())
    {
        assert_eq!(a["mono_cycles"], b["mono_cycles"]);
    }
}

#[test]
fn malformed_coloring_file_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.col");
    std::fs::write(&path, "qcube-coloring n=3 palette=2\n000 100 0\n").unwrap();
    let spec = format!("file:{}", path.display());
    let o = qcube(&["verify", "--n", "3", "--coloring", &spec, "--lengths", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("incomplete"), "{msg}");
}

fn write_subgraph(dir: &Path, edges: &[(&str, &str)]) -> String {
    let path = dir.join("g.txt");
    let mut text = format!("qcube-subgraph n={}\n", edges[0].0.len());
    for (a, b) in edges {
        text.push_str(&format!("{a} {b}\n"));
    }
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn bounds_with_subgraph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_subgraph(
        dir.path(),
        &[("000", "001"), ("001", "011"), ("010", "011"), ("000", "010")],
    );
    let o = qcube(&["bounds", "--n", "3", "--subgraph", &path]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["counts"]["edges"], 4);
    assert_eq!(v["counts"]["identity_holds"], true);
    assert_eq!(v["counts"]["hv_edge_total"], 4);
    assert_eq!(v["source"]["kind"], "file");

    let o = qcube(&["bounds", "--n", "4", "--subgraph", &path]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_random_and_formula() {
    let v = json(&qcube(&["bounds", "--n", "2"]));
    assert_eq!(v["bound"]["e_max"], 4.0);
    let v = json(&qcube(&["bounds", "--n", "4", "--random", "p=0.5,seed=7"]));
    assert_eq!(v["source"]["seed"], 7);
    assert_eq!(v["counts"]["identity_holds"], true);
    assert_eq!(v["lift"]["invalid_lifts"], 0);
    let v = json(&qcube(&["bounds", "--n", "100"]));
    assert!(v["bound"]["e_max"].is_null());
    assert!(v["bound"]["log2_e_max"].as_f64().unwrap() > 100.0);
}

#[test]
fn output_independent_of_threads() {
    for args in [
        &["enumerate", "--n", "5", "--length", "8"][..],
        &["verify", "--n", "6", "--induced"],
        &["bounds", "--n", "4", "--random", "p=0.4,seed=3"],
    ] {
        let one = qcube(&[&["--threads", "1"][..], args].concat());
        let four = qcube(&[&["--threads", "4"][..], args].concat());
        let again = qcube(&[&["--threads", "4"][..], args].concat());
        assert_eq!(one.stdout, four.stdout, "{args:?}");
        assert_eq!(four.stdout, again.stdout, "{args:?}");
    }
}

#[test]
fn stats_and_version() {
    let v = json(&qcube(&["stats", "--n", "4"]));
    assert_eq!(v["n"], 4);
    let o = qcube(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
}
