use std::path::{Path, PathBuf};
use std::process::Command;

use facered_cli::files::{CertificateFile, FrameworkFile, ProblemFile};
use proptest::prelude::*;
use serde_json::json;

fn facered(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_facered")).args(args).output().unwrap();
    let mut text = String::from_utf8_lossy(&out.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&out.stderr));
    (out.status.code().unwrap(), text)
}

fn write(dir: &Path, name: &str, value: &serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn square_file(kinds: [&str; 6]) -> serde_json::Value {
    let pairs = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)];
    json!({
        "dim": 2,
        "vertices": [["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]],
        "edges": pairs.iter().zip(kinds).map(|(&(i, j), k)| json!([i, j, k])).collect::<Vec<_>>(),
    })
}

#[test]
fn ladder_reduce_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("ladder.json");
    let cert = dir.path().join("cert.json");
    assert_eq!(facered(&["gen", "ladder", "3", s(&problem)]).0, 0);
    let (code, out) = facered(&["reduce", s(&problem), "--certificate-out", s(&cert)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l == "sd: 2"));
    assert_eq!(out.lines().filter(|l| l.starts_with("rank:")).count(), 2);
    let (code, out) = facered(&["validate", s(&problem), s(&cert)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("verdict: valid"));
}

#[test]
fn tampered_and_reordered_certificates_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("ladder.json");
    let cert = dir.path().join("cert.json");
    facered(&["gen", "ladder", "4", s(&problem)]);
    facered(&["reduce", s(&problem), "--certificate-out", s(&cert)]);
    let file: CertificateFile = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();

    let mut tampered = file.clone();
    tampered.steps[0].z[0][0] = json!(tampered.steps[0].z[0][0].as_f64().unwrap() + 0.5);
    let t = write(dir.path(), "tampered.json", &serde_json::to_value(&tampered).unwrap());
    let (code, out) = facered(&["validate", s(&problem), s(&t)]);
    assert_ne!(code, 0);
    assert!(out.contains("verdict: invalid"));

    let mut reordered = file.clone();
    reordered.steps.swap(0, 1);
    let r = write(dir.path(), "reordered.json", &serde_json::to_value(&reordered).unwrap());
    assert_ne!(facered(&["validate", s(&problem), s(&r)]).0, 0);

    let mut dropped = file;
    dropped.steps.pop();
    let d = write(dir.path(), "dropped.json", &serde_json::to_value(&dropped).unwrap());
    assert_ne!(facered(&["validate", s(&problem), s(&d)]).0, 0);
}

#[test]
fn orthant_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write(
        dir.path(),
        "strict.json",
        &json!({"cone": {"type": "orthant", "n": 3}, "constraints": [["1", "1", "1"]], "b": ["1"], "mode": "exact"}),
    );
    let (code, out) = facered(&["reduce", s(&strict)]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "sd: 0"));

    let singular = write(
        dir.path(),
        "singular.json",
        &json!({"cone": {"type": "orthant", "n": 3}, "constraints": [["1", "1", "0"], ["0", "1", "1"]], "b": ["0", "1"], "mode": "exact"}),
    );
    let (code, out) = facered(&["reduce", s(&singular)]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "sd: 1"));
    assert!(out.contains("support [2]"));

    let infeasible = write(
        dir.path(),
        "infeasible.json",
        &json!({"cone": {"type": "orthant", "n": 2}, "constraints": [["1", "1"]], "b": ["-1"], "mode": "exact"}),
    );
    assert_eq!(facered(&["reduce", s(&infeasible)]).0, 1);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(facered(&["reduce", s(&broken)]).0, 2);
    let shape = write(dir.path(), "shape.json", &json!({"cone": {"type": "orthant", "n": 2}, "constraints": [["1"]], "b": ["1"], "mode": "exact"}));
    assert_eq!(facered(&["reduce", s(&shape)]).0, 2);
    assert_eq!(facered(&["reduce", "/nonexistent/problem.json"]).0, 2);
    assert_eq!(facered(&["gen", "laman", "65"]).0, 2);
}

#[test]
fn rigidity_reports() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.json", &square_file(["bar"; 6]));
    let svg = dir.path().join("k4.svg");
    let (code, out) = facered(&["rigidity", s(&k4), "--svg-out", s(&svg)]);
    assert_eq!(code, 0, "{out}");
    for line in ["sd: 1", "rank: 1", "verdict: dimensionally rigid yes", "verdict: universally rigid yes"] {
        assert!(out.lines().any(|l| l == line), "missing {line:?} in\n{out}");
    }
    let picture = std::fs::read_to_string(&svg).unwrap();
    assert!(picture.contains("<svg") && picture.matches("<line").count() == 6);

    let tens = write(dir.path(), "tens.json", &square_file(["cable", "cable", "cable", "cable", "strut", "strut"]));
    let (code, out) = facered(&["rigidity", s(&tens)]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: proper yes") && out.contains("verdict: super stable yes"), "{out}");

    let k3 = write(
        dir.path(),
        "k3.json",
        &json!({"dim": 2, "vertices": [["0", "0"], ["3/7", "1/9"], ["1/5", "2"]], "edges": [[0, 1, "bar"], [1, 2, "bar"], [0, 2, "bar"]]}),
    );
    let (code, out) = facered(&["rigidity", s(&k3)]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "sd: 0"));

    let bad = write(dir.path(), "bad.json", &json!({"dim": 2, "vertices": [["0", "0"], ["1", "0"]], "edges": [[0, 1, "rope"]]}));
    assert_eq!(facered(&["rigidity", s(&bad)]).0, 2);
}

#[test]
fn generators_produce_accepted_files() {
    let (_, k3) = facered(&["gen", "laman", "3"]);
    let f: FrameworkFile = serde_json::from_str(&k3).unwrap();
    assert_eq!(f.edges.len(), 3);
    let (_, k4) = facered(&["gen", "planar", "4"]);
    let f: FrameworkFile = serde_json::from_str(&k4).unwrap();
    assert_eq!((f.vertices.len(), f.edges.len(), f.dim), (4, 6, 3));
    let (_, ladder) = facered(&["gen", "ladder", "3"]);
    let p: ProblemFile = serde_json::from_str(&ladder).unwrap();
    assert_eq!(p.constraints.len(), 2);

    let dir = tempfile::tempdir().unwrap();
    for (kind, n) in [("laman", 6), ("chordal", 7), ("planar", 6), ("ladder", 4)] {
        for seed in ["0", "5"] {
            let path = dir.path().join(format!("{kind}-{n}-{seed}.json"));
            assert_eq!(facered(&["gen", kind, &n.to_string(), "--seed", seed, s(&path)]).0, 0);
            let cmd = if kind == "ladder" { "reduce" } else { "rigidity" };
            let (code, out) = facered(&[cmd, s(&path)]);
            assert_eq!(code, 0, "{kind} {n} {seed}: {out}");
        }
    }
    let (code, out) = facered(&["batch", s(dir.path()), "--jobs", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("instances: 8"));
    assert_eq!(out.lines().filter(|l| l.contains(": sd: ")).count(), 8);
}

#[test]
fn output_is_deterministic() {
    let a = facered(&["gen", "chordal", "8", "--seed", "3"]);
    assert_eq!(a, facered(&["gen", "chordal", "8", "--seed", "3"]));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, &a.1).unwrap();
    assert_eq!(facered(&["rigidity", s(&path)]), facered(&["rigidity", s(&path)]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_problems_round_trip(entries in prop::collection::vec((-50i64..50, 1i64..20), 6), rhs in prop::collection::vec((-9i64..9, 1i64..9), 2)) {
        let num = |(p, q): &(i64, i64)| format!("{p}/{q}");
        let file = json!({
            "cone": {"type": "orthant", "n": 3},
            "constraints": [entries[..3].iter().map(num).collect::<Vec<_>>(), entries[3..].iter().map(num).collect::<Vec<_>>()],
            "b": rhs.iter().map(num).collect::<Vec<_>>(),
            "mode": "exact",
        });
        let parsed: ProblemFile = serde_json::from_value(file).unwrap();
        if let Ok(sys) = parsed.to_system(None) {
            let again: ProblemFile = serde_json::from_str(&serde_json::to_string(&ProblemFile::from_system(&sys).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(again.to_system(None).unwrap(), sys);
        }
    }

    #[test]
    fn float_frameworks_round_trip(coords in prop::collection::vec(-1e3f64..1e3, 8)) {
        let file = json!({
            "dim": 2,
            "vertices": coords.chunks(2).collect::<Vec<_>>(),
            "edges": [[0, 1, "bar"], [1, 2, "cable"], [2, 3, "strut"]],
            "seed": 4,
        });
        let f = serde_json::from_value::<FrameworkFile>(file).unwrap().to_framework().unwrap();
        let text = serde_json::to_string(&FrameworkFile::from_framework(&f, Some(4))).unwrap();
        prop_assert_eq!(serde_json::from_str::<FrameworkFile>(&text).unwrap().to_framework().unwrap(), f);
    }
}
