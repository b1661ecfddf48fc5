use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bilip(args: &[&str], seed_env: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bilip"));
    cmd.args(args);
    cmd.env_remove("BILIP_SEED");
    if let Some(s) = seed_env {
        cmd.env("BILIP_SEED", s);
    }
    let out = cmd.output().expect("the binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec(v).unwrap()).unwrap();
    p
}

fn load(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sample_net() -> Value {
    json!({
        "v": 1,
        "points": [[0.0, 1.0], [1.2, 0.8], [2.5, 1.2]],
        "y_mask": [true, false, true]
    })
}

fn lattice(half: i64, f: impl Fn(f64, f64) -> [f64; 2]) -> Value {
    let mut values = Vec::new();
    for j in -half..=half {
        for i in -half..=half {
            values.push(f(i as f64, j as f64));
        }
    }
    json!({"v": 1, "x": [-half, half], "y": [-half, half], "values": values})
}

#[test]
fn separate_writes_curve_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "net.json", &sample_net());
    let out = dir.path().join("curve.json");
    let svg = dir.path().join("curve.svg");
    let r = bilip(&["separate", "--net", s(&net), "--strip", "0.5,2", "--out", s(&out), "--svg", s(&svg)], None);
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    let doc = load(&out);
    assert_eq!(doc["v"], 1);
    assert_eq!(doc["pass"], true);
    assert!(doc["report"]["misclassified"].as_array().unwrap().is_empty());
    let fig = std::fs::read_to_string(&svg).unwrap();
    assert!(fig.starts_with("<svg") && fig.contains("<path") && fig.contains("<circle"));
    assert_eq!(fig.matches("<circle").count(), 3);
}

#[test]
fn outputs_are_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "net.json", &sample_net());
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let r = bilip(&["--seed", "5", "separate", "--net", s(&net), "--strip", "0.5,2", "--out", s(out)], None);
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn environment_seed_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "net.json", &sample_net());
    let out = dir.path().join("curve.json");
    let r = bilip(&["--seed", "5", "separate", "--net", s(&net), "--strip", "0.5,2", "--out", s(&out)], Some("9"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(load(&out)["config"]["seed"], 9);
    assert_eq!(load(&out)["bilip"]["seed"], 9);
}

#[test]
fn identity_permutation_decomposes_into_identity_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let perm = write(
        dir.path(),
        "perm.json",
        &json!({"l": 2, "window": [[-6, 6], [-6, 6]], "pairs": [], "half": false}),
    );
    let out = dir.path().join("rounds.json");
    let r = bilip(&["permdecomp", "--perm", s(&perm), "--T", "2", "--l", "2", "--out", s(&out)], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc = load(&out);
    assert_eq!(doc["factors"], 10);
    for round in doc["rounds"].as_array().unwrap() {
        assert!(round["pairs"].as_array().unwrap().is_empty(), "{round}");
    }
}

#[test]
fn a_swap_decomposes_into_local_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let perm = write(
        dir.path(),
        "perm.json",
        &json!({"l": 1, "window": [[-4, 4]], "pairs": [[[1], [2]], [[2], [1]]], "half": false}),
    );
    let out = dir.path().join("rounds.json");
    let r = bilip(&["permdecomp", "--perm", s(&perm), "--T", "1", "--l", "1", "--out", s(&out)], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(load(&out)["factors"], 4);
}

#[test]
fn dimension_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let perm = write(dir.path(), "perm.json", &json!({"l": 2, "window": [[-1, 1], [-1, 1]], "pairs": []}));
    let out = dir.path().join("rounds.json");
    let r = bilip(&["permdecomp", "--perm", s(&perm), "--T", "1", "--l", "1", "--out", s(&out)], None);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(!out.exists());
}

#[test]
fn tube_spin_verifies_against_its_bound() {
    // Swapping (0, 0) and (2, 0) in a tube of radius 1: 11‖y − x‖²/r² = 44.
    let tube = bilip_core::planemap::TubeSpin::new(
        bilip_core::geom::PointD::xy(0.0, 0.0),
        bilip_core::geom::PointD::xy(2.0, 0.0),
        1.0,
    )
    .unwrap();
    let map = bilip_core::planemap::PlaneMap::TubeSpin { tube };
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "F.json", &serde_json::to_value(&map).unwrap());
    let r = bilip(&["verify", "--map", s(&f), "--bound", "44"], None);
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    assert!(r.stdout.starts_with("verify: PASS"), "{}", r.stdout);
    let r = bilip(&["verify", "--map", s(&f), "--bound", "1"], None);
    assert_eq!(r.code, 2, "{}", r.stdout);
}

#[test]
fn slab_and_integer_rounding() {
    let dir = tempfile::tempdir().unwrap();
    let slab = write(
        dir.path(),
        "slab.json",
        &json!({"points": [[0.0, 0.3], [0.01, -0.4], [0.5, 0.0]], "s": 0.04, "d": 2}),
    );
    let out = dir.path().join("slab_map.json");
    let r = bilip(&["roundnet", "--net", s(&slab), "--mode", "slab", "--out", s(&out), "--samples", "2000"], None);
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    let doc = load(&out);
    assert_eq!(doc["mode"], "slab");
    assert_eq!(doc["slots"].as_array().unwrap().len(), 3);

    let net = write(
        dir.path(),
        "net.json",
        &json!({"points": [[0.0, 0.0], [3.0, 0.25], [-1.5, 3.5]], "r": 3.0, "d": 2}),
    );
    let out = dir.path().join("int_map.json");
    let r = bilip(&["roundnet", "--net", s(&net), "--mode", "integer", "--out", s(&out), "--samples", "2000"], None);
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    assert_eq!(load(&out)["images"], json!([[0, 0], [12, 1], [-6, 14]]));
}

#[test]
fn shoreline_separates_the_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &lattice(4, |x, y| [x + 0.3 * y, y]));
    let (out, svg) = (dir.path().join("line.json"), dir.path().join("shore.svg"));
    let r = bilip(&["shoreline", "--lattice", s(&f), "--k", "0", "--out", s(&out), "--svg", s(&svg)], None);
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    assert_eq!(load(&out)["report"]["components_ok"], true);
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<circle").count(), 81);
}

#[test]
fn stripext_extends_an_affine_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let line = |y: f64| json!({"breakpoints": [-10.0, 10.0], "vertices": [[-10.0, y], [10.0, y]], "tails": [[1.0, 0.0], [1.0, 0.0]]});
    let b = write(dir.path(), "boundary.json", &json!({"bottom": line(0.0), "top": line(2.0)}));
    let (out, svg) = (dir.path().join("strip.json"), dir.path().join("strip.svg"));
    let r = bilip(
        &["stripext", "--boundary", s(&b), "--h", "2", "--oracle", "coons", "--out", s(&out), "--svg", s(&svg), "--samples", "4000"],
        None,
    );
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    let doc = load(&out);
    assert!(doc["report"]["boundary_error"].as_f64().unwrap() <= 1e-9);
    assert!(std::fs::read_to_string(&svg).unwrap().contains(r#"id="panel1""#));
}

#[test]
fn thread_desk_passes_and_paper_reports_its_budget() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<[f64; 2]> = (-4..=4).map(|x| [x as f64 + 0.1, -0.05]).collect();
    let t = write(dir.path(), "t.json", &json!({"columns": [-4, 4], "values": values, "l": 24}));
    let out = dir.path().join("thread.json");
    let r = bilip(&["thread", "--input", s(&t), "--mode", "desk", "--out", s(&out), "--samples", "2000"], None);
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    assert_eq!(load(&out)["walls_fixed"], true);

    let r = bilip(&["thread", "--input", s(&t), "--mode", "paper", "--out", s(&out)], None);
    assert_eq!(r.code, 2, "{} {}", r.stdout, r.stderr);
    let doc = load(&out);
    assert_eq!(doc["pass"], false);
    assert!(doc["witness"].as_str().unwrap().contains("transpositions"), "{doc}");
}

#[test]
fn thread_hypotheses_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", &json!({"columns": [0, 1], "values": [[0.0, 0.0], [1.0, 0.0]], "l": 3}));
    let out = dir.path().join("thread.json");
    let r = bilip(&["thread", "--input", s(&t), "--out", s(&out)], None);
    assert_eq!(r.code, 1, "{}", r.stderr);
}

#[test]
fn extend_writes_map_ledger_and_panels_then_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &lattice(5, |x, y| [x + 0.2 * y, y]));
    let (out, rep, svg) = (dir.path().join("F.json"), dir.path().join("report.json"), dir.path().join("panels.svg"));
    let r = bilip(
        &[
            "extend", "--lattice", s(&f), "--profile", "desk", "--window", "-3,3", "--out", s(&out), "--report",
            s(&rep), "--svg", s(&svg), "--samples", "3000", "--round-trip", "1000", "--thread-samples", "200",
        ],
        None,
    );
    assert_eq!(r.code, 0, "{} {}", r.stdout, r.stderr);
    let doc = load(&out);
    assert_eq!(doc["x"], json!([-3, 3]));
    assert!(doc["lattice_error"].as_f64().unwrap() <= 1e-6);
    let ledger = load(&rep);
    let stages = ledger["stages"].as_array().unwrap();
    assert!(!stages.is_empty());
    for st in stages {
        assert!(st.get("paper_bound").is_some() && st.get("empirical_bound").is_some(), "{st}");
        assert_eq!(st["pass"], true, "{st}");
    }
    assert!(std::fs::read_to_string(&svg).unwrap().contains(r#"id="panel1""#));

    let v = bilip(&["verify", "--map", s(&out), "--bound", "1000", "--samples", "3000"], None);
    assert_eq!(v.code, 0, "{} {}", v.stdout, v.stderr);
}

#[test]
fn extend_rejects_a_window_outside_the_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &lattice(2, |x, y| [x, y]));
    let out = dir.path().join("F.json");
    let r = bilip(&["extend", "--lattice", s(&f), "--window", "-16,16", "--out", s(&out)], None);
    assert_eq!(r.code, 1, "{}", r.stderr);
}

#[test]
fn wrong_schema_version_and_missing_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut net = sample_net();
    net["v"] = json!(2);
    let p = write(dir.path(), "net.json", &net);
    let out = dir.path().join("curve.json");
    let r = bilip(&["separate", "--net", s(&p), "--strip", "0.5,2", "--out", s(&out)], None);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("schema version"), "{}", r.stderr);
    let r = bilip(&["separate", "--net", "/nonexistent.json", "--strip", "0.5,2", "--out", s(&out)], None);
    assert_eq!(r.code, 1);
}
