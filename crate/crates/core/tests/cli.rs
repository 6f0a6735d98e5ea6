use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn famcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_famcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(out));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn compute_prints_value_and_witness() {
    let dir = TempDir::new().unwrap();
    let family = write(&dir, "g.txt", "+++\n+-+\n");
    let out = famcorr(&["compute", "--family", &family, "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "value 2\npattern {(1,0),(1,1)}\nwindow 1 2\n");

    let fast = json(&famcorr(&[
        "compute", "--family", &family, "--order", "2", "--json",
    ]));
    let naive = json(&famcorr(&[
        "compute", "--family", &family, "--order", "2", "--json", "--naive",
    ]));
    assert_eq!(fast["value"], 2);
    assert_eq!(fast["format_version"], 1);
    assert_eq!(fast["value"], naive["value"]);
    assert_eq!(fast["pattern"], naive["pattern"]);
    assert_eq!(fast["window"], naive["window"]);
}

#[test]
fn compute_csv_has_a_versioned_header() {
    let dir = TempDir::new().unwrap();
    let seq = write(&dir, "e.txt", "0010\n");
    let out = famcorr(&["compute", "--sequence", &seq, "--order", "2", "--csv"]);
    assert_eq!(
        stdout(&out),
        "# famcorr compute csv v1: n,s,order,method,value,pattern,m1,m2\n\
         n,s,order,method,value,pattern,m1,m2\n\
         4,1,2,engine,2,\"{(1,0),(1,1)}\",2,3\n"
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let family = write(&dir, "g.txt", "+++\n+-+\n");
    let bad = write(&dir, "bad.txt", "++\n+x\n");
    let missing = dir.path().join("missing.txt");
    let missing = missing.to_str().unwrap();

    let out = famcorr(&["compute", "--family", missing, "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(missing));

    let out = famcorr(&["compute", "--family", &bad, "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));

    let out = famcorr(&["compute", "--sequence", &family, "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(
        famcorr(&["compute", "--family", &family, "--order", "7"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(famcorr(&["compute", "--order", "2"]).status.code(), Some(2));
    assert_eq!(famcorr(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(famcorr(&["--help"]).status.code(), Some(0));

    let out = famcorr(&[
        "experiment",
        "--n",
        "16",
        "--s",
        "1",
        "--k",
        "1000000",
        "--samples",
        "2",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let out = famcorr(&[
        "experiment",
        "--n",
        "1024",
        "--s",
        "8",
        "--k",
        "5",
        "--samples",
        "2",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("estimated cost"));

    let out = famcorr(&["minimize", "--n", "12", "--s", "3", "--order", "3"]);
    assert_eq!(out.status.code(), Some(4));

    let out = famcorr(&[
        "bound", "--n", "100", "--s", "300", "--order", "3", "--even",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn randomized_commands_require_a_seed() {
    let out = famcorr(&[
        "experiment",
        "--n",
        "16",
        "--s",
        "1",
        "--k",
        "2",
        "--samples",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
    let out = famcorr(&["sample", "--n", "16", "--s", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn experiment_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = |workers: &'static str, prefix: &str| {
        vec![
            "experiment".to_owned(),
            "--n".into(),
            "64".into(),
            "--s".into(),
            "2".into(),
            "--k".into(),
            "2,3".into(),
            "--samples".into(),
            "40".into(),
            "--seed".into(),
            "99".into(),
            "--workers".into(),
            workers.into(),
            "--out".into(),
            prefix.into(),
        ]
    };
    let mut reports = Vec::new();
    for workers in ["1", "2", "8"] {
        let prefix = dir.path().join(format!("run{workers}"));
        let a = args(workers, prefix.to_str().unwrap());
        let out = famcorr(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let read =
            |ext: &str| std::fs::read(Path::new(&format!("{}.{ext}", prefix.display()))).unwrap();
        reports.push((read("csv"), read("json")));
    }
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(reports[0].0.clone()).unwrap();
    assert!(csv.starts_with("# famcorr experiment csv v1: "));
    assert_eq!(csv.lines().count(), 2 + 80);
    let summary: Value = serde_json::from_slice(&reports[0].1).unwrap();
    assert_eq!(summary["format_version"], 1);
    assert!(summary["orders"][0]["envelopes"]["t1_lo"].is_number());
}

#[test]
fn construct_then_compute() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("digit.txt");
    let path = path.to_str().unwrap();
    let out = famcorr(&["construct", "--s", "4", "--n", "8", "--out", path]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# N=8 S=4\n"));
    let value = json(&famcorr(&[
        "compute", "--family", path, "--order", "3", "--json",
    ]));
    assert!(value["value"].as_u64().unwrap() <= 2);

    let out = famcorr(&["construct", "--n", "6", "--kind", "alternating"]);
    assert_eq!(stdout(&out), "# N=6 S=1\n+-+-+-\n");
}

#[test]
fn minimize_small_family() {
    let report = json(&famcorr(&[
        "minimize", "--n", "4", "--s", "2", "--order", "3",
    ]));
    assert_eq!(report["min"], 1);
    let unpruned = json(&famcorr(&[
        "minimize",
        "--n",
        "4",
        "--s",
        "2",
        "--order",
        "3",
        "--no-prune",
    ]));
    assert_eq!(report["min"], unpruned["min"]);
    assert_eq!(report["argmin"], unpruned["argmin"]);
    assert_eq!(
        report["optima_up_to_symmetry"],
        unpruned["optima_up_to_symmetry"]
    );
}

#[test]
fn bounds() {
    let even = json(&famcorr(&[
        "bound", "--n", "100", "--s", "300", "--order", "2", "--even",
    ]));
    assert_eq!(even["branch"], "min-1");
    assert!((even["branch_value"].as_f64().unwrap() - 1.29750110630865).abs() < 1e-12);
    let odd = json(&famcorr(&[
        "bound", "--n", "8", "--s", "1024", "--order", "3",
    ]));
    assert_eq!(
        (odd["lower"].as_u64(), odd["upper"].as_u64()),
        (Some(8), Some(10))
    );
}

#[test]
fn certify_reports_replayable_witnesses() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.txt");
    let path = path.to_str().unwrap();
    let out = famcorr(&[
        "sample", "--n", "32", "--s", "6", "--seed", "5", "--out", path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    for order in ["4", "5"] {
        let cert = json(&famcorr(&["certify", "--family", path, "--order", order]));
        let bound = cert["implied_bound"].as_u64().unwrap();
        let phi = json(&famcorr(&[
            "compute", "--family", path, "--order", order, "--json",
        ]));
        assert!(bound <= phi["value"].as_u64().unwrap());
        if order == "4" {
            assert_eq!(cert["rank"]["basic"]["holds"], true);
        }
    }
}
