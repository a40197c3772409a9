//! End-to-end tests driving the `smf` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn smf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("smf-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn record(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("run record is JSON")
}

fn gen_random(path: &Path, n: usize, d: usize, seed: u64) {
    let out = smf(&[
        "gen",
        "random",
        "--n",
        &n.to_string(),
        "--D",
        &d.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_random_roundtrips_and_is_deterministic() {
    let p1 = tmp("rand1.json");
    let p2 = tmp("rand2.json");
    gen_random(&p1, 100, 4, 7);
    gen_random(&p2, 100, 4, 7);
    let a = std::fs::read_to_string(&p1).unwrap();
    let b = std::fs::read_to_string(&p2).unwrap();
    assert_eq!(a, b, "same seed, same bytes");
    let loaded = shuffled_monotone::io::load_instance(&p1).unwrap();
    assert_eq!(loaded.instance.n(), 100);
    assert_eq!(loaded.instance.num_directions(), 4);
    loaded.truth.unwrap().validate(&loaded.instance).unwrap();
}

#[test]
fn gen_star_passes_star_condition_on_reload() {
    let p = tmp("star3.json");
    let out = smf(&["gen", "star", "--d", "3", "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    let loaded = shuffled_monotone::io::load_instance(&p).unwrap();
    assert_eq!(loaded.instance.n(), 6);
    // Rebuild the hypothesis family from the generator parameters and check
    // the star condition against the stored points.
    let (points, hyps) = shuffled_monotone::generators::gen_star_instance(3);
    assert_eq!(points.points(), loaded.geometry.as_ref().unwrap().0.points());
    assert!(shuffled_monotone::verify::verify_star_condition(&points, &hyps).unwrap());
}

#[test]
fn gen_circle_has_matching_arity() {
    let p = tmp("circle8.json");
    let out = smf(&["gen", "circle", "--n", "8", "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    let loaded = shuffled_monotone::io::load_instance(&p).unwrap();
    assert_eq!(loaded.instance.n(), 8);
    assert_eq!(loaded.instance.num_directions(), 8);
    assert_eq!(loaded.labels.iter().filter(|&&b| b).count(), 1);
}

#[test]
fn gen_unknown_generator_exits_2() {
    let out = smf(&["gen", "nope", "--out", tmp("x.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_missing_params_exits_2() {
    let out = smf(&["gen", "random", "--n", "10", "--out", tmp("y.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn learn_exact_is_correct_on_planted() {
    let p = tmp("learn-exact.json");
    gen_random(&p, 512, 6, 13);
    let out = smf(&["learn", "exact", "--instance", p.to_str().unwrap()]);
    let rec = record(&out);
    assert_eq!(rec["correct"], true);
    assert_eq!(rec["error_fraction"], 0.0);
    assert_eq!(rec["status"], "ok");
    assert!(rec["distinct_queries"].as_u64().unwrap() > 0);
}

#[test]
fn learn_exact_beats_baseline_on_queries() {
    let p = tmp("learn-sep.json");
    gen_random(&p, 4096, 16, 21);
    let exact = record(&smf(&["learn", "exact", "--instance", p.to_str().unwrap()]));
    let base = record(&smf(&["learn", "baseline", "--instance", p.to_str().unwrap()]));
    assert_eq!(exact["correct"], true);
    assert_eq!(base["correct"], true);
    assert!(
        exact["distinct_queries"].as_u64().unwrap()
            < base["distinct_queries"].as_u64().unwrap()
    );
}

#[test]
fn learn_tolerant_with_corruption() {
    let p = tmp("learn-tol.json");
    gen_random(&p, 2000, 4, 5);
    let out = smf(&[
        "learn",
        "tolerant",
        "--instance",
        p.to_str().unwrap(),
        "--eps",
        "0.05",
        "--delta",
        "0.25",
        "--corrupt",
        "0.00002",
        "--corrupt-mode",
        "boundary",
        "--seed",
        "3",
    ]);
    let rec = record(&out);
    assert_eq!(rec["status"], "ok");
    assert!(rec["error_fraction"].as_f64().unwrap() <= 0.05);
}

#[test]
fn learn_requires_params_for_approx() {
    let p = tmp("learn-missing.json");
    gen_random(&p, 64, 2, 1);
    let out = smf(&["learn", "tolerant", "--instance", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn learn_not_realizable_is_recorded_with_exit_0() {
    // m=3 gives n=7 < D ceil(log2(n+2)): the baseline queries everything
    // and is trivially correct even though nothing is monotone. m=4 gives
    // n=9, forcing the binary-search path whose surviving candidate then
    // contradicts an observed bit.
    let p3 = tmp("learn-depth2-m3.json");
    assert!(smf(&["gen", "depth-two", "--m", "3", "--out", p3.to_str().unwrap()])
        .status
        .success());
    let rec = record(&smf(&["learn", "baseline", "--instance", p3.to_str().unwrap()]));
    assert_eq!(rec["correct"], true);
    assert_eq!(rec["status"], "ok");

    let p4 = tmp("learn-depth2-m4.json");
    assert!(smf(&["gen", "depth-two", "--m", "4", "--out", p4.to_str().unwrap()])
        .status
        .success());
    let rec2 = record(&smf(&["learn", "baseline", "--instance", p4.to_str().unwrap()]));
    assert_eq!(rec2["status"], "not_realizable");
    assert_eq!(rec2["correct"], false);
    assert!(rec2["error_fraction"].is_null());
}

#[test]
fn learn_emits_trace() {
    let p = tmp("learn-trace.json");
    let t = tmp("trace.jsonl");
    gen_random(&p, 256, 3, 9);
    let out = smf(&[
        "learn",
        "exact",
        "--instance",
        p.to_str().unwrap(),
        "--trace",
        t.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let trace = std::fs::read_to_string(&t).unwrap();
    let mut phases = std::collections::HashSet::new();
    for line in trace.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("trace line is JSON");
        phases.insert(v["phase"].as_str().unwrap().to_string());
        assert!(v.get("queried").is_some());
        assert!(v.get("outcome").is_some());
    }
    assert!(phases.contains("constant_check"));
    assert!(phases.contains("subroutine"));
    assert!(phases.contains("contender"));
}

#[test]
fn bench_is_deterministic_and_exact_within_bound() {
    let spec = tmp("suite.json");
    std::fs::write(
        &spec,
        r#"{
  "seed": 42,
  "cells": [
    {"generator": "random", "learner": "exact", "n": [1024, 2048], "D": [4, 8], "trials": 3},
    {"generator": "random", "learner": "baseline", "n": [1024], "D": [4], "trials": 3}
  ]
}"#,
    )
    .unwrap();
    let out1 = tmp("bench1.csv");
    let out2 = tmp("bench2.csv");
    for (out, par) in [(&out1, "1"), (&out2, "2")] {
        let r = smf(&[
            "bench",
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--parallel",
            par,
        ]);
        assert!(r.status.success(), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    }
    let a = std::fs::read_to_string(&out1).unwrap();
    let b = std::fs::read_to_string(&out2).unwrap();
    assert_eq!(a, b, "bench output must not depend on parallelism");

    // Every exact trial stays within 10 D + 12 ceil(log2 n) + 14 and is
    // correct.
    for line in a.lines().filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 12 || cols[2] != "exact" {
            continue;
        }
        let n: usize = cols[3].parse().unwrap();
        let d: usize = cols[4].parse().unwrap();
        let q: usize = cols[7].parse().unwrap();
        let correct = cols[9] == "true";
        let bound = 10 * d + 12 * shuffled_monotone::exact::ceil_log2(n) + 14;
        assert!(correct, "bench exact trial incorrect: {line}");
        assert!(q <= bound, "bench exact trial over budget: {line}");
    }
}

#[test]
fn bench_malformed_spec_exits_2() {
    let spec = tmp("bad-suite.json");
    std::fs::write(&spec, "{\"seed\": 1}").unwrap();
    let out = smf(&[
        "bench",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        tmp("bad.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
