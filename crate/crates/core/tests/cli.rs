// Copyright 2026 The fraclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fs;
use std::process::{Command, Output};

fn fraclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclab"))
        .args(args)
        .env_remove("FRACLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bounds_sharp_instance() {
    let o = fraclab(&["bounds", "--s", "2", "--alpha", "1", "--beta", "1", "--gamma", "0", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "thm1_bound=1.5 x*=0.5\n");
}

#[test]
fn bounds_with_corollary_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let o = fraclab(&[
        "bounds", "--s", "1.5", "--alpha", "0.5", "--beta", "0", "--gamma", "0.2", "--d", "2",
        "--corollary", "cor3", "--json", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("cor3="));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["thm1"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn classify_examples() {
    let o = fraclab(&["classify", "--poly", "x^2-2"]);
    assert_eq!(stdout(&o), "garsia_reciprocal lambda≈0.70711\n");
    let o = fraclab(&["classify", "--poly", "x^2-x-1"]);
    assert_eq!(stdout(&o), "pisot_reciprocal lambda≈0.61803\n");
    let o = fraclab(&["classify", "--lambda", "0.6"]);
    assert_eq!(stdout(&o), "unclassified lambda≈0.60000\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn exit_codes() {
    assert_eq!(fraclab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(fraclab(&["bounds", "--nonsense"]).status.code(), Some(64));
    assert_eq!(fraclab(&[]).status.code(), Some(64));
    assert_eq!(fraclab(&["--help"]).status.code(), Some(0));
    let o = fraclab(&["boxdim", "--preset", "bernoulli_comb", "--lambda", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fraclab(&["separation", "--lambda", "0.6", "--n-max", "31"]);
    assert_eq!(o.status.code(), Some(3));
    let o = fraclab(&["bounds", "--s", "1", "--alpha", "2", "--beta", "0", "--gamma", "0", "--d", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fraclab(&["overlaps", "--preset", "bernoulli_comb", "--lambda", "0.6", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dry_run_computes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let o = fraclab(&[
        "boxdim", "--preset", "bernoulli_comb", "--lambda-poly", "x^2-2", "--m", "6:15", "--csv",
        csv.to_str().unwrap(), "--dry-run",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("plan: boxdim preset bernoulli_comb lambda=0.707107 (exact)"));
    assert!(!csv.exists());
    let missing = dir.path().join("no/such/dir/out.csv");
    let o = fraclab(&[
        "boxdim", "--preset", "bernoulli_comb", "--lambda", "0.6", "--csv", missing.to_str().unwrap(), "--dry-run",
    ]);
    assert_eq!(o.status.code(), Some(1));
    for args in [
        vec!["classify", "--poly", "x^2-2", "--dry-run"],
        vec!["render", "--preset", "bernoulli_comb", "--lambda", "0.6", "--svg", "x.svg", "--dry-run"],
        vec!["bounds", "--s", "1", "--alpha", "0", "--beta", "0", "--gamma", "0", "--d", "1", "--dry-run"],
        vec!["separation", "--lambda", "0.6", "--dry-run"],
        vec!["overlaps", "--preset", "bernoulli_comb", "--lambda", "0.6", "--dry-run"],
        vec!["wsp", "--preset", "bernoulli_comb", "--lambda", "0.6", "--dry-run"],
        vec!["sphere", "--dry-run"],
        vec!["scan", "--dry-run"],
    ] {
        let o = fraclab(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(stdout(&o).starts_with("plan: "), "{args:?}");
    }
}

#[test]
fn boxdim_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let o = fraclab(&[
            "boxdim", "--preset", "bernoulli_comb", "--lambda", "0.6", "--m", "3:9", "--delta-matching",
            "--threads", threads, "--csv", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        assert!(stdout(&o).starts_with("dim_est≈"));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("m,delta,count,log2count\n3,1.25e-1,"));
    assert_eq!(text.lines().count(), 8);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn thread_env_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_fraclab"))
        .args(["separation", "--lambda", "0.6", "--n-max", "4"])
        .env("FRACLAB_THREADS", "two")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_fraclab"))
        .args(["separation", "--lambda", "0.6", "--n-max", "4"])
        .env("FRACLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("comb.svg");
    let o = fraclab(&["render", "--preset", "bernoulli_comb", "--lambda-poly", "x^2-2", "--m", "7", "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("<rect"));
    let o = fraclab(&["render", "--preset", "affine_companion", "--lambda", "0.6", "--m", "6", "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
}

#[test]
fn overlap_and_separation_reports() {
    let o = fraclab(&["overlaps", "--preset", "bernoulli_comb", "--lambda-poly", "x^2-x-1", "--max-len", "3", "--exact"]);
    assert_eq!(stdout(&o), "overlaps=1 first=(011)~(100)\n");
    let o = fraclab(&["overlaps", "--preset", "bernoulli_comb", "--lambda-poly", "x^2-2", "--max-len", "8", "--exact"]);
    assert_eq!(stdout(&o), "overlaps=0\n");
    let o = fraclab(&["overlaps", "--preset", "bernoulli_comb", "--lambda", "0.6", "--max-len", "3"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("float mode"));
    let o = fraclab(&["separation", "--lambda-poly", "x^2-x-1", "--n-max", "3", "--exact"]);
    let text = stdout(&o);
    assert!(text.contains("exact count_A=7 collisions=1"), "{text}");
    assert!(text.contains("first collision (100)~(011)"), "{text}");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sep.csv");
    let o = fraclab(&["separation", "--lambda-poly", "x^2-2", "--n-max", "10", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,count_A,min_gap,scaled_gap,well_separated\n"));
    assert_eq!(text.lines().count(), 11);
    let o = fraclab(&["wsp", "--preset", "bernoulli_comb", "--lambda-poly", "x^2-x-1", "--max-len", "6", "--exact"]);
    assert!(stdout(&o).starts_with("wsp_min="), "{o:?}");
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sys.json");
    fs::write(
        &cfg,
        r#"{"dimension": 1, "maps": [{"scale": 0.5, "translation": [0.0]}, {"scale": 0.5, "translation": [0.5]}]}"#,
    )
    .unwrap();
    let o = fraclab(&["boxdim", "--config", cfg.to_str().unwrap(), "--m", "2:8"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let slope: f64 = stdout(&o)["dim_est≈".len()..].split_whitespace().next().unwrap().parse().unwrap();
    assert!((slope - 1.0).abs() < 0.05, "{slope}");
    let o = fraclab(&["boxdim", "--config", cfg.to_str().unwrap(), "--preset", "sphere"]);
    assert_eq!(o.status.code(), Some(2));
    let sphere = dir.path().join("sphere.json");
    fs::write(
        &sphere,
        r#"{"preset": {"name": "sphere", "params": {"c": 0.9, "generators": [{"axis": [0, 0, 1], "angle_deg": 30}], "include_inverses": false}}}"#,
    )
    .unwrap();
    let o = fraclab(&["sphere", "--config", sphere.to_str().unwrap(), "--n-max", "4"]);
    assert!(stdout(&o).ends_with(" counts=1,1,1,1,1\n"), "{o:?}");
    assert!(fs::write(dir.path().join("bad.json"), "{").is_ok());
    let o = fraclab(&["boxdim", "--config", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sphere_and_scan_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let o = fraclab(&["sphere", "--m", "5", "--n-max", "5", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("epsilon_hat="));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("n,count,log2count\n0,1,0.000000\n"));
    let o = fraclab(&["scan", "--samples", "2", "--n-max", "8"]);
    let text = stdout(&o);
    assert!(text.starts_with("passed=") && text.ends_with("/2\n"), "{text}");
    let scan_csv = dir.path().join("scan.csv");
    let o = fraclab(&["scan", "--lo", "0.55", "--hi", "0.55", "--n-max", "10", "--csv", scan_csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&scan_csv).unwrap().starts_with("lambda,target,pass_fraction,all_pass,r2_ratio,slope\n0.550000000000,"));
}
