use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chordal-tw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<String> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().to_string())
        .collect()
}

#[test]
fn count_examples() {
    let trees = stdout_ok(&["count", "--t", "1", "--k", "1", "--N", "5"]);
    assert_eq!(trees.lines().next(), Some("n,count"));
    assert_eq!(csv_column(&trees, 1), ["1", "1", "3", "16", "125"]);

    let two_trees = stdout_ok(&["count", "--t", "2", "--k", "2", "--N", "5"]);
    assert_eq!(csv_column(&two_trees, 1), ["0", "1", "1", "6", "70"]);

    let all = stdout_ok(&[
        "count",
        "--t",
        "2",
        "--k",
        "0",
        "--N",
        "3",
        "--check-integral-unroot",
    ]);
    assert_eq!(csv_column(&all, 1), ["1", "2", "8"]);
}

#[test]
fn count_json_round_trip() {
    let text = stdout_ok(&[
        "--format", "json", "count", "--t", "3", "--k", "2", "--N", "8",
    ]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["t"], 3);
    assert_eq!(v["k"], 2);
    let counts = v["counts"].as_array().unwrap();
    assert_eq!(counts.len(), 8);
    assert_eq!(counts[2]["count"], "1");
    assert_eq!(counts[3]["count"], "7");
    let back = serde_json::to_string(&v).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&back).unwrap(), v);
}

#[test]
fn verify_passes_and_detects_corruption() {
    let text = stdout_ok(&["verify", "--tmax", "1", "--N", "6"]);
    assert_eq!(
        text.lines().next(),
        Some("t,k,n,series_count,oracle_count,match")
    );
    assert_eq!(text.lines().count(), 1 + 12);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let defaults = stdout_ok(&["verify"]);
    assert!(defaults.lines().skip(1).all(|l| l.ends_with(",true")));

    let bad = run(&["verify", "--tmax", "2", "--N", "5", "--corrupt", "2,1,4"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(",false")).count(), 1);
}

#[test]
fn table_output() {
    let one = stdout_ok(&["table", "--tmax", "1"]);
    assert_eq!(one, "t,k=1\n1,0.36788\n");

    let four = stdout_ok(&["table", "--tmax", "4", "--prec", "1e-10"]);
    let cells: Vec<&str> = four
        .lines()
        .skip(1)
        .flat_map(|l| l.split(',').skip(1))
        .filter(|c| !c.is_empty())
        .collect();
    assert_eq!(cells.len(), 10);

    let json = stdout_ok(&["table", "--tmax", "2", "--json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for e in entries {
        for r in e["residuals"].as_array().unwrap() {
            assert!(r.as_f64().unwrap().abs() < 1e-10, "{e}");
        }
        assert!(e["y_star"].as_f64().unwrap() > 1.0);
    }
}

#[test]
fn moments_examples() {
    let text = stdout_ok(&["moments", "--t", "1", "--k", "0", "--i", "2", "--N", "3"]);
    assert_eq!(text.lines().nth(3), Some("3,2,9/7,24/49"));

    let trees = stdout_ok(&["moments", "--t", "1", "--k", "1", "--i", "2", "--N", "7"]);
    for (idx, line) in trees.lines().skip(1).enumerate() {
        let n = idx + 1;
        assert_eq!(line, format!("{n},2,{},0", n - 1));
    }

    let json = stdout_ok(&[
        "--format", "json", "moments", "--t", "2", "--k", "2", "--i", "2", "--N", "4",
    ]);
    let v: Value = serde_json::from_str(&json).unwrap();
    let rows = v["moments"].as_array().unwrap();
    // n = 1 has no 2-connected graphs and is skipped
    assert_eq!(rows[0]["n"], 2);
    assert_eq!(rows.last().unwrap()["mean"]["num"], "5");
    assert_eq!(rows.last().unwrap()["var"]["num"], "0");
}

#[test]
fn moments_per_n_settle() {
    let text = stdout_ok(&[
        "moments", "--t", "2", "--k", "1", "--i", "2", "--N", "14", "--per-n",
    ]);
    let means: Vec<f64> = csv_column(&text, 4)
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let gaps: Vec<f64> = means.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let tail = &gaps[gaps.len() - 4..];
    assert!(tail.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn asymptotics_k_tree() {
    let text = stdout_ok(&[
        "--format",
        "json",
        "asymptotics",
        "--t",
        "2",
        "--k",
        "2",
        "--N",
        "30",
    ]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let rho = v["rho_branch"].as_f64().unwrap();
    assert!((rho - (-1.0f64).exp() / 2.0).abs() < 1e-10);
    assert!((v["rho_ratio"].as_f64().unwrap() - rho).abs() < 1e-3);
    assert!((v["exponent"].as_f64().unwrap() + 2.5).abs() < 0.05);
    let c = v["constant"].as_f64().unwrap();
    let closed = v["closed_form"].as_f64().unwrap();
    assert!((c / closed - 1.0).abs() < 0.01);
}

#[test]
fn series_dump_parses() {
    use chordal_tw::mps::Series;
    for which in ["g", "rooted", "upper"] {
        let text = stdout_ok(&[
            "series-dump",
            "--t",
            "2",
            "--k",
            "1",
            "--N",
            "5",
            "--which",
            which,
        ]);
        let s = Series::from_json_str(text.trim()).unwrap();
        assert_eq!(s.to_json_string(), text.trim());
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["count", "--t", "1"][..],
        &["count", "--t", "1", "--k", "3", "--N", "4"],
        &["table", "--tmax", "6"],
        &["table", "--tmax", "2", "--prec", "0.5"],
        &["moments", "--t", "2", "--k", "1", "--i", "7"],
        &["verify", "--N", "20"],
        &["bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn deterministic_across_runs_and_workers() {
    let args = ["count", "--t", "3", "--k", "1", "--N", "12"];
    let a = stdout_ok(&args);
    assert_eq!(a, stdout_ok(&args));
    let mut with_workers = vec!["--workers", "1"];
    with_workers.extend(args);
    assert_eq!(a, stdout_ok(&with_workers));
    with_workers[1] = "3";
    assert_eq!(a, stdout_ok(&with_workers));

    let t = ["table", "--tmax", "3"];
    assert_eq!(
        stdout_ok(&t),
        stdout_ok(&["--workers", "2", "table", "--tmax", "3"])
    );
}
