use std::process::{Command, Output};

use serde_json::Value;

fn ptlame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptlame")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV output (comment lines and header removed).
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn sample_potential_shifted_a3_pt() {
    let out = ptlame(&["sample-potential", "--pt", "--shift-zero"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# command=sample-potential a=3 b=0 m=0.75 beta=0.5 ops=pt shift_zero=true"));
    assert!(meta.contains("period=3.3715"));
    assert_eq!(lines.next().unwrap(), "x,re_v,im_v");

    let data = rows(&text);
    assert_eq!(data.len(), 800);
    let at = |j: usize| (num(&data[j][0]), num(&data[j][1]), num(&data[j][2]));
    // x = 0 sits in the middle of [-L, L)
    let (x0, _, im0) = at(400);
    assert_eq!(x0, 0.0);
    assert!(im0.abs() < 1e-12);
    for j in 1..400 {
        let (xp, rp, ip) = at(400 + j);
        let (xm, rm, im) = at(400 - j);
        assert!((xp + xm).abs() < 1e-12);
        assert!((rp - rm).abs() < 1e-9 && (ip + im).abs() < 1e-9, "PT symmetry at x = {xp}");
    }
}

#[test]
fn sample_potential_period_matches_rows() {
    let text = stdout(&ptlame(&["sample-potential", "--pt", "--n", "10"]));
    let data = rows(&text);
    assert_eq!(data.len(), 20);
    for j in 0..10 {
        assert!((num(&data[j][1]) - num(&data[j + 10][1])).abs() < 1e-9);
    }
}

#[test]
fn edges_match_closed_forms() {
    let out = ptlame(&["edges", "--a", "3", "--pt"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap() == "index,energy_analytic,energy_numeric,abs_diff,discriminant,period_class");
    let data = rows(&text);
    assert_eq!(data.len(), 7);
    let classes: String = data.iter().map(|r| r[5].clone()).collect();
    assert_eq!(classes, "PAAPPAA");
    assert!(text.contains("# verdict: PASS"));

    let out = ptlame(&["edges", "--a", "2", "--b", "1", "--pt"]);
    assert_eq!(out.status.code(), Some(0));
    let data = rows(&stdout(&out));
    assert_eq!(data.len(), 5);
    let classes: String = data.iter().map(|r| r[5].clone()).collect();
    assert_eq!(classes, "PAAPP");
}

#[test]
fn edges_exit_three_when_tolerance_is_impossible() {
    let out = ptlame(&["edges", "--a", "1", "--pt", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("# verdict: FAIL"));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["edges", "--a", "1", "--b", "2"],
        vec!["sample-potential", "--pt", "--beta", "0"],
        vec!["sample-potential", "--m", "1.5"],
        vec!["scan", "--a", "1", "--paired"],
        vec!["scan", "--emin", "3", "--emax", "1"],
        vec!["selfcheck", "--beta", "0"],
        vec!["edges", "--no-such-flag"],
    ] {
        let out = ptlame(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.trim().is_empty(), "{args:?}");
    }
}

#[test]
fn flag_order_is_recorded_and_respected() {
    let a = stdout(&ptlame(&["sample-potential", "--a", "3", "--pt", "--partner", "--n", "8"]));
    let b = stdout(&ptlame(&["sample-potential", "--a", "3", "--partner", "--pt", "--n", "8"]));
    assert!(a.lines().next().unwrap().contains("ops=pt,partner"));
    assert!(b.lines().next().unwrap().contains("ops=partner,pt"));
    assert_ne!(rows(&a), rows(&b));
}

#[test]
fn paired_scan_json_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let out = ptlame(&[
        "scan",
        "--a",
        "3",
        "--pt",
        "--paired",
        "--emin",
        "-14",
        "--emax",
        "0",
        "--n",
        "15",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["a"], 3);
    assert_eq!(doc["metadata"]["energy_offset"], 12.0);
    let names: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names[0], "e");
    let diffs = doc["columns"][5]["values"].as_array().unwrap();
    assert_eq!(diffs.len(), 15);
    assert!(diffs.iter().all(|v| v.as_f64().unwrap() < 1e-6));
}

#[test]
fn scan_imaginary_part_vanishes() {
    let out = ptlame(&["scan", "--a", "3", "--pt", "--emin", "-12", "--emax", "0", "--n", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1).unwrap(), "e,re_delta,im_delta");
    for r in rows(&text) {
        assert!(num(&r[2]).abs() < 1e-7);
    }
}

#[test]
fn dispersion_a1_agrees_and_gaps_are_evanescent() {
    let out = ptlame(&["dispersion", "--a", "1", "--pt", "--shift-zero", "--emin", "-1", "--emax", "3", "--n", "41"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# verdict: PASS"));
    let m = 0.75;
    let mut compared = 0;
    for r in rows(&text) {
        let e = num(&r[0]);
        let (kre, kim) = (num(&r[1]), num(&r[2]));
        let in_gap = e < 0.0 || (e > m && e < 1.0);
        if in_gap {
            assert!(kim > 0.0, "E = {e}");
        } else if !r[5].is_empty() {
            assert!(num(&r[5]) < 1e-6);
            assert!(kim.abs() < 1e-12 && kre >= 0.0);
            compared += 1;
        }
    }
    assert!(compared > 20);
}

#[test]
fn outputs_are_deterministic() {
    let args = ["edges", "--a", "2", "--b", "1", "--pt", "--format", "json"];
    assert_eq!(ptlame(&args).stdout, ptlame(&args).stdout);
}

#[test]
fn selfcheck_passes_and_tightens() {
    let out = ptlame(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!text.contains("FAIL"));

    let strict = ptlame(&["selfcheck", "--tol", "1e-14"]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(stdout(&strict).lines().any(|l| l.starts_with("FAIL")));
}
