use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tiny(file: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/tiny");
    dir.join(file).to_string_lossy().into_owned()
}

fn data_args() -> Vec<String> {
    vec![
        "--edges".into(),
        tiny("tiny.hyperedges"),
        "--features".into(),
        tiny("tiny.features.csv"),
    ]
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperseed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_data(cmd: &str, extra: &[&str]) -> Output {
    let data = data_args();
    let mut args: Vec<&str> = vec![cmd];
    args.extend(data.iter().map(String::as_str));
    args.extend(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn select_to(dir: &TempDir, name: &str, extra: &[&str]) -> serde_json::Value {
    let out = dir.path().join(name);
    let mut args = vec!["--budget", "2", "--output", out.to_str().unwrap()];
    args.extend(extra);
    let o = run_with_data("select", &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn select_writes_budget_seeds_with_monotone_trace() {
    let dir = TempDir::new().unwrap();
    let doc = select_to(&dir, "r.json", &[]);
    assert_eq!(doc["seeds"].as_array().unwrap().len(), 2);
    let trace: Vec<f64> = doc["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["objective"].as_f64().unwrap())
        .collect();
    assert_eq!(trace.len(), 2);
    assert!(trace[0] <= trace[1]);
}

#[test]
fn gamma_extremes_give_different_traces() {
    let dir = TempDir::new().unwrap();
    let coverage = select_to(&dir, "g1.json", &["--gamma", "1.0"]);
    let diffusion = select_to(&dir, "g0.json", &["--gamma", "0.0"]);
    assert_ne!(coverage["seeds"], diffusion["seeds"]);
    assert_ne!(coverage["trace"], diffusion["trace"]);
}

#[test]
fn naive_and_lazy_files_are_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("lazy.json");
    let b = dir.path().join("naive.json");
    for (path, naive) in [(&a, false), (&b, true)] {
        let mut args = vec!["--budget", "4", "--output", path.to_str().unwrap()];
        if naive {
            args.push("--naive");
        }
        assert!(run_with_data("select", &args).status.success());
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn output_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one.json");
    let two = dir.path().join("two.json");
    for (path, threads) in [(&one, "1"), (&two, "3")] {
        let o = run_with_data(
            "select",
            &[
                "--budget",
                "3",
                "--seed",
                "7",
                "--threads",
                threads,
                "--output",
                path.to_str().unwrap(),
            ],
        );
        assert!(o.status.success());
    }
    assert_eq!(fs::read(one).unwrap(), fs::read(two).unwrap());
}

#[test]
fn stats_counts_and_determinism() {
    let a = run_with_data("stats", &[]);
    let b = run_with_data("stats", &[]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let edges = fs::read_to_string(tiny("tiny.hyperedges")).unwrap();
    let m = edges
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .count();
    assert!(
        text.contains(&format!("hyperedges          {m}\n")),
        "{text}"
    );
    assert!(text.contains("nodes               12\n"), "{text}");
}

#[test]
fn stats_theta_one_reports_empty_sets() {
    let o = run_with_data("stats", &["--theta", "1"]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("empty activation    12/12"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn evaluate_rejects_empty_seed_file() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("seeds.txt");
    fs::write(&seeds, "\n").unwrap();
    let o = run_with_data(
        "evaluate",
        &[
            "--labels",
            &tiny("tiny.labels.csv"),
            "--seeds",
            seeds.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn evaluate_requires_labels() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("seeds.txt");
    fs::write(&seeds, "0\n").unwrap();
    let o = run_with_data("evaluate", &["--seeds", seeds.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn evaluate_all_seeded_accuracy_equals_fit() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("seeds.txt");
    let all: String = (0..12).map(|i| format!("{i}\n")).collect();
    fs::write(&seeds, all).unwrap();
    let o = run_with_data(
        "evaluate",
        &[
            "--labels",
            &tiny("tiny.labels.csv"),
            "--seeds",
            seeds.to_str().unwrap(),
        ],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    let value = |key: &str| {
        text.lines()
            .find(|l| l.starts_with(key))
            .and_then(|l| l.split_whitespace().last())
            .unwrap()
            .to_string()
    };
    assert_eq!(value("accuracy"), value("train fit"));
}

#[test]
fn evaluate_reads_result_documents() {
    let dir = TempDir::new().unwrap();
    select_to(
        &dir,
        "r.json",
        &["--train-split", "--splits", &tiny("tiny.splits.json")],
    );
    let o = run_with_data(
        "evaluate",
        &[
            "--labels",
            &tiny("tiny.labels.csv"),
            "--splits",
            &tiny("tiny.splits.json"),
            "--seeds",
            dir.path().join("r.json").to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("eval nodes  4\n"));
}

#[test]
fn exit_codes_by_error_class() {
    assert_eq!(run(&["select", "--bogus"]).status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.hyperedges");
    fs::write(&bad, "0 1\n2,3\n").unwrap();
    let o = run(&[
        "stats",
        "--edges",
        bad.to_str().unwrap(),
        "--features",
        &tiny("tiny.features.csv"),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));

    assert_eq!(
        run_with_data("select", &["--gamma", "1.5"]).status.code(),
        Some(5)
    );
    assert_eq!(
        run_with_data("select", &["--budget", "13"]).status.code(),
        Some(5)
    );

    let o = run(&[
        "stats",
        "--edges",
        "/nonexistent/x",
        "--features",
        &tiny("tiny.features.csv"),
    ]);
    assert_eq!(o.status.code(), Some(6));
}
