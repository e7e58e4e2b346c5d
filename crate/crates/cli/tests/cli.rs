use std::path::Path;
use std::process::{Command, Output};

fn dqwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqwalk")).args(args).output().unwrap()
}

fn records(bytes: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn classical_distribution_rows() {
    let out = dqwalk(&["distribution", "--p", "1", "--t", "4"]);
    assert!(out.status.success());
    let (headers, rows) = records(&out.stdout);
    assert_eq!(headers, ["t", "x", "probability", "method"]);
    let xs: Vec<i64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(xs, [-4, -2, 0, 2, 4]);
    for (r, c) in rows.iter().zip([1.0, 4.0, 6.0, 4.0, 1.0]) {
        assert_eq!(num(&r[2]), c / 16.0);
        assert_eq!(r[3], "renewal");
    }
}

#[test]
fn pure_right_coin_two_steps() {
    let out = dqwalk(&["distribution", "--p", "0", "--t", "2", "--initial", "right"]);
    let (_, rows) = records(&out.stdout);
    let got: Vec<(i64, f64)> = rows.iter().map(|r| (r[1].parse().unwrap(), num(&r[2]))).collect();
    assert_eq!(got, [(-2, 0.25), (0, 0.5), (2, 0.25)]);
}

#[test]
fn distribution_sums_to_one_for_every_method() {
    for method in ["renewal", "superop", "oracle"] {
        let out = dqwalk(&["distribution", "--p", "0.35", "--t", "7", "--method", method]);
        assert!(out.status.success(), "{method}");
        let (_, rows) = records(&out.stdout);
        let total: f64 = rows.iter().map(|r| num(&r[2])).sum();
        assert!((total - 1.0).abs() <= 1e-12, "{method}: {total}");
    }
}

#[test]
fn moments_examples() {
    let out = dqwalk(&["moments", "--p", "0.3", "--t", "300"]);
    let (headers, rows) = records(&out.stdout);
    assert_eq!(headers, ["t", "mean_exact", "var_exact", "mean_formula", "var_formula"]);
    assert_eq!(rows.len(), 300);
    assert!(rows.iter().all(|r| num(&r[1]).abs() <= 1e-12));
    let last = &rows[299];
    assert!((num(&last[2]) - num(&last[4])).abs() <= 1e-6);

    let out = dqwalk(&["moments", "--p", "1", "--t", "60", "--initial", "right"]);
    let (_, rows) = records(&out.stdout);
    for r in &rows {
        let t = num(&r[0]);
        assert!((num(&r[2]) - t).abs() <= 1e-12 * t);
        assert!((num(&r[4]) - t).abs() <= 1e-12 * t);
    }
}

#[test]
fn json_mirrors_csv() {
    let csv_out = dqwalk(&["distribution", "--p", "0.5", "--t", "5"]);
    let json_out = dqwalk(&["distribution", "--p", "0.5", "--t", "5", "--format", "json"]);
    let (_, rows) = records(&csv_out.stdout);
    let v: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), rows.len());
    for (obj, row) in arr.iter().zip(&rows) {
        assert_eq!(obj["x"].as_i64().unwrap(), row[1].parse::<i64>().unwrap());
        assert_eq!(obj["probability"].as_f64().unwrap(), num(&row[2]));
    }
}

#[test]
fn converge_schedule_and_trend() {
    let out = dqwalk(&["converge", "--p", "1", "--t", "1000"]);
    assert!(out.status.success());
    let (headers, rows) = records(&out.stdout);
    assert_eq!(headers, ["t", "ks_distance", "cf_error"]);
    let ts: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ts, ["125", "250", "500", "1000"]);
    assert!(num(&rows[3][1]) <= 0.02);
    assert!(num(&rows[3][1]) < num(&rows[1][1]));
}

#[test]
fn mc_is_reproducible_and_echoes_seed() {
    let args = ["mc", "--p", "0.5", "--t", "30", "--samples", "5000", "--seed", "77"];
    let a = dqwalk(&args);
    let b = dqwalk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed = 77"));
    let (headers, rows) = records(&a.stdout);
    assert_eq!(headers, ["t", "x", "frequency", "count"]);
    let total: u64 = rows.iter().map(|r| r[3].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 5000);
}

#[test]
fn figures_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = dqwalk(&["figures", "--out", d.to_str().unwrap()]);
        assert!(out.status.success());
    }
    for name in ["fig1.csv", "fig2.csv", "fig3.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let (_, fig3) = records(&std::fs::read(a.join("fig3.csv")).unwrap());
    assert_eq!(num(&fig3[0][0]), 0.01);
    assert!((num(&fig3[0][1]) - 247.3).abs() <= 0.05);
}

#[test]
fn config_file_is_read_and_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# classical walk\np = 1\nt = 2\n").unwrap();
    let out = dqwalk(&["distribution", "--config", conf.to_str().unwrap(), "--t", "4"]);
    let (_, rows) = records(&out.stdout);
    assert_eq!(rows.len(), 5);
    assert_eq!(num(&rows[0][2]), 1.0 / 16.0);
}

#[test]
fn bad_input_exits_nonzero_with_message() {
    for args in [
        &["distribution", "--p", "1.2"][..],
        &["distribution", "--t", "-1"],
        &["moments", "--p", "0"],
        &["distribution", "--method", "oracle", "--t", "12"],
    ] {
        let out = dqwalk(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = dqwalk(&["distribution", "--t", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let file_run = dqwalk(&["distribution", "--p", "0.2", "--t", "9", "--out", path.to_str().unwrap()]);
    assert!(file_run.status.success());
    assert!(file_run.stdout.is_empty());
    let stdout_run = dqwalk(&["distribution", "--p", "0.2", "--t", "9"]);
    assert_eq!(std::fs::read(Path::new(&path)).unwrap(), stdout_run.stdout);
}

#[test]
fn fast_verify_passes() {
    let out = dqwalk(&["verify", "--fast"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("0 failed, 7 skipped"), "{text}");
    assert_eq!(text.matches("[PASS]").count(), 5);
}
