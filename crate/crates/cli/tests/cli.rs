use std::path::Path;
use std::process::{Command, Output};

use nsii_cli::CSV_HEADER;

fn nsii(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsii"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn nsii_threads(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsii"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(csv: &'a str, mechanism: &str, mode: &str, column: &str) -> &'a str {
    let col = CSV_HEADER.split(',').position(|c| c == column).unwrap();
    let line = csv
        .lines()
        .find(|l| {
            let f: Vec<_> = l.split(',').collect();
            f[2] == mechanism && f[3] == mode
        })
        .unwrap_or_else(|| panic!("no {mechanism}/{mode} row in\n{csv}"));
    line.split(',').nth(col).unwrap()
}

#[test]
fn analytic_row_reproduces_headline_improvements() {
    let o = nsii(&["--p", "0.37", "--delta", "0.9"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 3);
    let gross: f64 = field(&csv, "nsii", "analytic", "gross_impr_pct").parse().unwrap();
    let net: f64 = field(&csv, "nsii", "analytic", "net_impr_pct").parse().unwrap();
    let profit: f64 = field(&csv, "nsii", "analytic", "profit_pct").parse().unwrap();
    assert!((gross - 7.6).abs() < 0.01 && (net - 7.0).abs() < 0.03 && (profit - 0.58).abs() < 0.01);
    assert_eq!(field(&csv, "nsii", "analytic", "gsw_stderr"), "");
}

#[test]
fn normalize_scales_only_levels() {
    let raw = stdout(&nsii(&["--p", "0.37", "--mechanism", "nsii"]));
    let norm = stdout(&nsii(&["--p", "0.37", "--mechanism", "nsii", "--normalize"]));
    let g = |csv: &str, c: &str| field(csv, "nsii", "analytic", c).parse::<f64>().unwrap();
    assert!((g(&norm, "gsw") - 0.1 * g(&raw, "gsw")).abs() < 1e-11);
    assert!((g(&norm, "gsw") - 0.762770543183717).abs() < 1e-11);
    assert_eq!(g(&norm, "gross_impr_pct"), g(&raw, "gross_impr_pct"));
}

#[test]
fn simulation_csv_is_byte_stable_across_runs_and_threads() {
    let args = [
        "--p-grid",
        "0.2:0.3:0.1",
        "--mode",
        "simulate",
        "--episodes",
        "3000",
        "--seed",
        "11",
    ];
    let a = nsii_threads(&args, 1);
    let b = nsii_threads(&args, 3);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    assert_eq!(csv.lines().count(), 5);
    assert_ne!(field(&csv, "nsii", "simulate", "revenue_stderr"), "");
}

#[test]
fn crosscheck_passes() {
    let o = nsii(&["--p", "0.25", "--mode", "crosscheck", "--episodes", "100000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn dp_mode_reports_finite_horizon_revenue() {
    let csv = stdout(&nsii(&["--p", "0.25", "--mode", "dp", "--horizon", "3"]));
    let v: f64 = field(&csv, "optimal", "dp", "revenue").parse().unwrap();
    assert!((v - 0.0759375).abs() < 1e-12);
    assert_eq!(field(&csv, "bhw", "dp", "revenue"), "0");
    assert_eq!(field(&csv, "optimal", "dp", "gsw"), "");
}

#[test]
fn config_file_with_flag_override_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    let series = dir.path().join("series");
    std::fs::write(
        &cfg,
        format!(
            "# small sweep\np-grid = 0.1:0.4:0.1\ndelta = 0.5\nout = {}\nseries = {}\n",
            out.display(),
            series.display()
        ),
    )
    .unwrap();
    let o = nsii(&["--config", cfg.to_str().unwrap(), "--delta", "0.9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(1) == Some("0.9")));

    let gross = std::fs::read_to_string(series.join("nsii_gross_impr_pct.dat")).unwrap();
    let ps: Vec<&str> = gross.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(ps, ["0.1", "0.2", "0.3", "0.4"]);
    for name in ["bhw_gsw.dat", "nsii_gsw.dat", "nsii_nsw.dat", "nsii_revenue.dat"] {
        assert!(Path::new(&series.join(name)).exists(), "{name}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(nsii(&["--p", "0.6"]).status.code(), Some(1));
    assert_eq!(
        nsii(&["--p", "0.2", "--mode", "dp", "--horizon", "12"]).status.code(),
        Some(1)
    );
    assert_eq!(nsii(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(nsii(&["--config", "/nonexistent/run.cfg"]).status.code(), Some(1));
    assert_eq!(
        nsii(&["--p", "0.2", "--out", "/nonexistent/dir/out.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(nsii(&["--help"]).status.code(), Some(0));
}
