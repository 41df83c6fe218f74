use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn emitgen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emitgen"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn structured(dir: &Path, args: &[&str]) -> Value {
    let mut all = vec!["--format", "structured"];
    all.extend_from_slice(args);
    let out = emitgen(dir, &all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("structured output is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn graph_files_match_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, file) in [
        ("ring", "ring6.toml"),
        ("shor22", "encoded_ring6.toml"),
        ("core", "core6.toml"),
    ] {
        let v = structured(dir.path(), &["graph", kind, "6", "--out", file]);
        let written = fs::read_to_string(dir.path().join(file)).unwrap();
        assert_eq!(
            written,
            fs::read_to_string(fixture(file)).unwrap(),
            "{kind}"
        );
        assert!(dir.path().join(format!("{file}.manifest.json")).exists());
        assert_eq!(v["graph_hash"].as_str().unwrap().len(), 64);
    }
    let v = structured(dir.path(), &["graph", "shor22", "6", "--out", "e.toml"]);
    assert_eq!(
        (v["vertices"].as_u64(), v["edges"].as_u64()),
        (Some(24), Some(36))
    );
    assert_eq!(
        (v["hadamards"].as_u64(), v["leaves"].as_u64()),
        (Some(12), Some(12))
    );
}

#[test]
fn graph_file_round_trip_keeps_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let src = fixture("encoded_ring6.toml");
    let a = structured(
        dir.path(),
        &["graph", "file", path_str(&src), "--out", "copy.toml"],
    );
    let copy = dir.path().join("copy.toml");
    let b = structured(
        dir.path(),
        &["graph", "file", path_str(&copy), "--out", "copy2.toml"],
    );
    assert_eq!(a["graph_hash"], b["graph_hash"]);
}

#[test]
fn solve_reproduces_the_ring_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("ring6.toml");
    let v = structured(
        dir.path(),
        &[
            "solve",
            "--graph",
            path_str(&g),
            "--ordering",
            "1,2,3,6,5,4",
            "--times",
        ],
    );
    assert_eq!(v["emitters"], 2);
    assert_eq!(v["cnots"], 2);
    assert_eq!(v["verified"], true);
    assert_eq!(v["dense_checked"], true);
    assert_eq!(v["within_bounds"], true);
    assert!(v["cnots"].as_u64() <= v["bound_agnostic"]["total"].as_u64());
    let golden: String = fs::read_to_string(fixture("ring6_circuit_123654.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(
        fs::read_to_string(dir.path().join("circuit.txt")).unwrap(),
        golden
    );
}

#[test]
fn verify_fixture_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let ring = fixture("ring6.toml");
    let circuit = fixture("ring6_circuit_123654.txt");
    let v = structured(
        dir.path(),
        &[
            "verify",
            "--circuit",
            path_str(&circuit),
            "--graph",
            path_str(&ring),
            "--ordering",
            "1,2,3,6,5,4",
            "--times",
        ],
    );
    assert_eq!(v["verified"], true);
    assert_eq!(v["cnots"], 2);

    // wrong ordering: the circuit builds a different labelling
    let out = emitgen(
        dir.path(),
        &[
            "verify",
            "--circuit",
            path_str(&circuit),
            "--graph",
            path_str(&ring),
        ],
    );
    assert_eq!(code(&out), 4);
}

#[test]
fn encoded_ring_circuit_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let enc = fixture("encoded_ring6.toml");
    let faithful = fixture("encoded_ring6_circuit.txt");
    let corrected = fixture("encoded_ring6_circuit_corrected.txt");

    let out = emitgen(
        dir.path(),
        &[
            "verify",
            "--circuit",
            path_str(&faithful),
            "--graph",
            path_str(&enc),
            "--up-to-isomorphism",
        ],
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("photon 15"));

    let v = structured(
        dir.path(),
        &[
            "verify",
            "--circuit",
            path_str(&corrected),
            "--graph",
            path_str(&enc),
            "--up-to-isomorphism",
            "--ignore-hadamards",
        ],
    );
    assert_eq!(v["isomorphic"], true);
    assert_eq!(v["cnots"], 11);
    assert_eq!(v["emitters_used"], 3);

    let out = emitgen(
        dir.path(),
        &[
            "verify",
            "--circuit",
            path_str(&corrected),
            "--graph",
            path_str(&enc),
            "--up-to-isomorphism",
        ],
    );
    assert_eq!(code(&out), 4);
}

#[test]
fn exhaustive_search_writes_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("ring6.toml");
    let v = structured(
        dir.path(),
        &[
            "search",
            "--graph",
            path_str(&g),
            "--mode",
            "exhaustive",
            "--verify",
            "--emit-plot-data",
        ],
    );
    assert_eq!(v["evaluated"], 60);
    assert_eq!(v["verified"], 60);
    assert_eq!(v["verify_failures"], 0);
    assert_eq!(v["best_cell"]["emitters"], 2);
    assert_eq!(v["best_cell"]["cnots"], 2);
    for f in [
        "histogram.tsv",
        "histogram.json",
        "histogram.plot.dat",
        "histogram.manifest.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let tsv = fs::read_to_string(dir.path().join("histogram.tsv")).unwrap();
    assert!(tsv.starts_with("emitters\tcnots\tcount\n"));
    let total: u64 = tsv
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(2).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 60);
    let doc: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("histogram.json")).unwrap())
            .unwrap();
    assert_eq!(doc["provenance"]["mode"], "exhaustive");
    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("histogram.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "search");
    assert_eq!(manifest["seed"], 0);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let g = fixture("encoded_ring6.toml");
    let mut outputs = Vec::new();
    for workers in ["1", "0", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = emitgen(
            dir.path(),
            &[
                "--workers",
                workers,
                "--seed",
                "17",
                "search",
                "--graph",
                path_str(&g),
                "--mode",
                "random",
                "--samples",
                "300",
            ],
        );
        assert!(out.status.success());
        let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
        outputs.push((read("histogram.tsv"), read("histogram.json")));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn seed_changes_random_samples() {
    let g = fixture("encoded_ring6.toml");
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = emitgen(
            dir.path(),
            &[
                "--seed",
                seed,
                "search",
                "--graph",
                path_str(&g),
                "--mode",
                "random",
                "--samples",
                "50",
            ],
        );
        assert!(out.status.success());
        fs::read_to_string(dir.path().join("histogram.json")).unwrap()
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn lifted_search_on_a_small_encoded_ring() {
    let dir = tempfile::tempdir().unwrap();
    structured(dir.path(), &["graph", "shor22", "4", "--out", "enc4.toml"]);
    let g = dir.path().join("enc4.toml");
    let v = structured(
        dir.path(),
        &[
            "search",
            "--graph",
            path_str(&g),
            "--mode",
            "lifted",
            "--verify",
            "--name",
            "lift",
        ],
    );
    assert_eq!(v["mode"], "lifted");
    assert_eq!(v["verify_failures"], 0);
    assert!(v["lifted_core_orderings"].as_u64().unwrap() > 0);
    assert!(dir.path().join("lift.core.tsv").exists());

    let v = structured(
        dir.path(),
        &[
            "search",
            "--graph",
            path_str(&g),
            "--mode",
            "lifted",
            "--cell",
            "99,99",
            "--name",
            "none",
        ],
    );
    assert_eq!(v["lifted_core_orderings"], 0);
    assert!(v["notice"].is_string());
}

#[test]
fn exhaustive_over_budget_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("encoded_ring6.toml");
    let out = emitgen(
        dir.path(),
        &["search", "--graph", path_str(&g), "--mode", "exhaustive"],
    );
    assert_eq!(code(&out), 5);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("807875523090155520000"), "{err}");
    assert!(err.contains("random or lifted"), "{err}");
    assert!(!dir.path().join("histogram.tsv").exists());
}

#[test]
fn bounds_report() {
    let dir = tempfile::tempdir().unwrap();
    let v = structured(dir.path(), &["bounds", "24", "3"]);
    assert_eq!(v["total"], 62);
    assert_eq!(v["a_bound"], 36);
    assert_eq!(v["m_bound"], 24);
    assert_eq!(v["e_bound"], 2);
    let v = structured(dir.path(), &["bounds", "6", "2"]);
    assert_eq!(v["total"], 13);
    let out = emitgen(dir.path(), &["bounds", "6", "2"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("13"));
}

#[test]
fn bad_inputs_exit_with_their_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "vertices = \"many\"\n").unwrap();
    let out = emitgen(
        dir.path(),
        &["solve", "--graph", path_str(&bad), "--ordering", "1"],
    );
    assert_eq!(code(&out), 3);

    let ring = fixture("ring6.toml");
    let out = emitgen(
        dir.path(),
        &["solve", "--graph", path_str(&ring), "--ordering", "1,2,3"],
    );
    assert_eq!(code(&out), 3);
    let out = emitgen(
        dir.path(),
        &[
            "solve",
            "--graph",
            path_str(&ring),
            "--ordering",
            "1,1,2,3,4,5",
        ],
    );
    assert_eq!(code(&out), 3);

    let missing = dir.path().join("missing.txt");
    let out = emitgen(
        dir.path(),
        &[
            "verify",
            "--circuit",
            path_str(&missing),
            "--graph",
            path_str(&ring),
        ],
    );
    assert_ne!(code(&out), 0);

    let out = emitgen(dir.path(), &["search", "--mode", "sideways"]);
    assert_eq!(code(&out), 2);
}
