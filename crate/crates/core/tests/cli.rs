mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use rtlnp::*;
use serde_json::Value;

fn rtlnp_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtlnp")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = rtlnp_cmd(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn extract_counts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let mut r = rng(1);
    write_dataset(
        &data,
        &[
            ("one", (0..3).map(|_| random_image(&mut r, 20, 20)).collect()),
            ("two", (0..3).map(|_| random_image(&mut r, 24, 18)).collect()),
        ],
    );
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let stdout = ok(&["extract", p(&data), "--out", p(&a)]);
    assert!(stdout.contains("6 entries"));
    ok(&["extract", p(&data), "--out", p(&b), "--workers", "3"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let doc = read_json(&a);
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["descriptor_name"], "rtlnp");
    assert_eq!(doc["params"]["r_in"], 3);
    assert_eq!(doc["params"]["theta_zero"], 0);
    assert_eq!(doc["entries"].as_array().unwrap().len(), 6);
    assert_eq!(doc["entries"][0]["raw_bins"].as_array().unwrap().len(), 1024);
    assert_eq!(doc["entries"][0]["total"], 64);

    ok(&["extract", p(&data), "--out", p(&b), "--descriptor", "lbp"]);
    let doc = read_json(&b);
    assert_eq!(doc["descriptor_name"], "lbp");
    assert!(doc["params"].is_null());
}

#[test]
fn extract_reports_unreadable_file() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &[("c", vec![synth_image(SynthKind::RampY, 20, 20).unwrap()])]);
    let bad = dir.path().join("c").join("broken.pgm");
    std::fs::write(&bad, b"garbage").unwrap();
    let out = rtlnp_cmd(&["extract", p(dir.path()), "--out", p(&dir.path().join("i.json"))]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[format]:"));
    assert!(err.contains(p(&bad)));
}

#[test]
fn bad_params_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = rtlnp_cmd(&["extract", p(dir.path()), "--out", "x.json", "--rin", "4", "--rout", "2"]);
    assert_eq!(out.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[params]:"));
    let out = rtlnp_cmd(&["frobnicate"]);
    assert!(!out.status.success());
}

#[test]
fn feature_image_export() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.pgm");
    synth_image(SynthKind::Constant(77), 30, 30).unwrap().save_pgm(&flat).unwrap();
    let out1 = dir.path().join("f1.pgm");
    let out2 = dir.path().join("f2.pgm");
    ok(&["feature-image", p(&flat), "--out", p(&out1)]);
    ok(&["feature-image", p(&flat), "--out", p(&out2)]);
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    let img = load_grayscale(&out1).unwrap();
    assert_eq!((img.width(), img.height()), (30, 30));
    assert!(img.pixels().iter().all(|&v| v == 0));

    let ramp = dir.path().join("ramp.pgm");
    synth_image(SynthKind::RampX, 30, 30).unwrap().save_pgm(&ramp).unwrap();
    let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
    ok(&["feature-image", p(&ramp), "--out", p(&a), "--rin", "3", "--rout", "6", "--theta", "36"]);
    ok(&["feature-image", p(&ramp), "--out", p(&b), "--rin", "1", "--rout", "3", "--theta", "36"]);
    let (fa, fb) = (load_grayscale(&a).unwrap(), load_grayscale(&b).unwrap());
    let interior = |img: &GrayImage| -> Vec<u8> {
        (6..24).flat_map(|r| (6..24).map(move |c| (r, c))).map(|(r, c)| img.get(c, r)).collect()
    };
    assert_ne!(interior(&fa), interior(&fb));

    let tiny = dir.path().join("tiny.pgm");
    synth_image(SynthKind::Constant(1), 10, 10).unwrap().save_pgm(&tiny).unwrap();
    let out = rtlnp_cmd(&["feature-image", p(&tiny), "--out", p(&dir.path().join("t.pgm"))]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn query_ranks_index_entries() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    write_dataset(&data, &planted_image_dataset(4));
    let idx = dir.path().join("i.json");
    ok(&["extract", p(&data), "--out", p(&idx), "--rin", "2", "--rout", "4"]);
    let q = data.join("rings").join("02.pgm");
    let stdout = ok(&["query", p(&q), "--index", p(&idx), "--top", "3"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1\t0.000000\trings\trings/02.pgm"));
}

fn planted_benchmark(workers: &str, out: &Path, data: &Path) -> String {
    ok(&[
        "benchmark", "--dataset", p(data), "--out", p(out), "--rin", "2", "--rout", "4", "--theta", "45",
        "--lambda-max", "11", "--cmc-max-rank", "11", "--workers", workers,
    ])
}

#[test]
fn benchmark_matches_brute_force_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    write_dataset(&data, &planted_image_dataset(2));
    let (o1, o8) = (dir.path().join("w1"), dir.path().join("w8"));
    planted_benchmark("1", &o1, &data);
    let stdout = planted_benchmark("8", &o8, &data);
    assert!(stdout.contains("recognition rate"));
    for f in ["index.json", "report.json", "report.csv"] {
        assert_eq!(std::fs::read(o1.join(f)).unwrap(), std::fs::read(o8.join(f)).unwrap(), "{f}");
    }

    let idx = GalleryIndex::load(o1.join("index.json")).unwrap();
    let labels: Vec<&str> = idx.entries().iter().map(|e| e.class_label.as_str()).collect();
    let feats: Vec<Vec<f64>> = idx.entries().iter().map(|e| e.feature.clone()).collect();
    let brute = brute_metrics(&labels, &distance_matrix(&feats), 11, true);
    let rep = read_json(&o1.join("report.json"));
    let arr_of = |k: &str| -> Vec<f64> { rep[k].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect() };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    assert!(arr_of("arp_curve").iter().zip(&brute.arp).all(|(a, b)| close(*a, *b)));
    assert!(arr_of("arr_curve").iter().zip(&brute.arr).all(|(a, b)| close(*a, *b)));
    assert!(arr_of("cmc").iter().zip(&brute.cmc).all(|(a, b)| close(*a, *b)));
    assert!(close(rep["arp"].as_f64().unwrap(), brute.arp_summary));
    assert!(close(rep["arr"].as_f64().unwrap(), brute.arr_summary));
    assert!(close(rep["f_score"].as_f64().unwrap(), brute.f_score));
    assert!(close(rep["anmrr"].as_f64().unwrap(), brute.anmrr));
    assert!(close(rep["recognition_rate"].as_f64().unwrap(), brute.recognition_rate));
    assert_eq!(rep["dataset_size"], 12);
    assert_eq!(rep["class_count"], 3);

    let csv = std::fs::read_to_string(o1.join("report.csv")).unwrap();
    assert!(csv.starts_with("metric,x,value\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("arp,")).count(), 11);

    // re-evaluating from the saved index yields the same report
    let o3 = dir.path().join("from_index");
    ok(&["benchmark", "--index", p(&o1.join("index.json")), "--out", p(&o3), "--lambda-max", "11", "--cmc-max-rank", "11"]);
    assert_eq!(std::fs::read(o1.join("report.json")).unwrap(), std::fs::read(o3.join("report.json")).unwrap());
}

#[test]
fn benchmark_duplicates_and_singletons() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    let mut r = rng(8);
    let classes: Vec<(&str, Vec<GrayImage>)> = ["p", "q", "s"]
        .into_iter()
        .map(|c| {
            let img = random_image(&mut r, 20, 20);
            (c, vec![img.clone(), img.clone(), img])
        })
        .collect();
    write_dataset(&data, &classes);
    for d in ["rtlnp", "lbp"] {
        let out = dir.path().join(d);
        ok(&["benchmark", "--dataset", p(&data), "--out", p(&out), "--descriptor", d]);
        let rep = read_json(&out.join("report.json"));
        assert_eq!(rep["recognition_rate"], 100.0);
        assert_eq!(rep["anmrr"], 0.0);
        assert_eq!(rep["descriptor"], d);
    }

    write_dataset(&data, &[("zz_single", vec![random_image(&mut r, 20, 20)])]);
    let out = dir.path().join("single");
    let stdout = ok(&["benchmark", "--dataset", p(&data), "--out", p(&out), "--recall-denominator", "excl-query"]);
    assert!(stdout.contains("ANMRR skipped"));
    let rep = read_json(&out.join("report.json"));
    assert!(rep["anmrr"].is_null());
    assert_eq!(rep["recall_denominator"], "excl-query");
    assert!(rep["recognition_rate"].as_f64().unwrap() < 100.0);
}
