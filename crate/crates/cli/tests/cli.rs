use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tasrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tasrate")).args(args).output().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn rate(rows: &[Vec<String>], value: &str, series: &str) -> f64 {
    rows.iter()
        .find(|r| r[1] == value && r[2] == series)
        .unwrap_or_else(|| panic!("no row {value} {series}"))[3]
        .parse()
        .unwrap()
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = tasrate(&[
            "sweep",
            "--nt",
            "8",
            "--nr",
            "2",
            "--bits",
            "1,3,inf",
            "--snr-db",
            "-10:30:10",
            "--trials",
            "5000",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(path).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("# tasrate "));
    assert!(text.contains("trials=5000 seed=1"));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "axis,value,series,rate_bits,std_err,trials,seed"
    );
    assert_eq!(rows(&text).len(), 5 * 3 * 2);
}

#[test]
fn worker_count_does_not_change_output() {
    let args = [
        "simulate", "--nt", "4", "--nr", "2", "--snr-db", "0,10", "--trials", "9000",
    ];
    let a = Command::new(env!("CARGO_BIN_EXE_tasrate"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_tasrate"))
        .args(args)
        .env("RAYON_NUM_THREADS", "7")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_requests_fail_before_computing() {
    for args in [
        vec!["sweep", "--series", ""],
        vec!["bound", "--nr", "2", "--series", "cor1"],
        vec!["bound", "--nt", "1,4", "--series", "cor2"],
        vec!["bound", "--series", "mc_exact"],
        vec!["simulate", "--nt", "2", "--rule", "fixed:3"],
        vec!["sweep", "--snr-db", "0,0"],
        vec!["fit", "--nr", "0"],
        vec!["sweep", "--bits", "0"],
        vec!["simulate", "--rule", "best"],
        vec!["quantizer", "--bits", "inf"],
    ] {
        let out = tasrate(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn failed_series_are_summarized_and_exit_nonzero() {
    let out = tasrate(&["sweep", "--nr", "2", "--trials", "200", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("lb_thm1: 1 point(s) failed, first at 10"), "{stderr}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(rows(&stdout).len(), 1);
    assert_eq!(rows(&stdout)[0][2], "mc_exact");
}

#[test]
fn unwritable_output_names_the_path() {
    let out = tasrate(&["bound", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn svg_chart_written_next_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let out = tasrate(&[
        "bound",
        "--nt",
        "1:8:1",
        "--series",
        "cor1,ub_thm2",
        "--bits",
        "2,4",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 4);
    assert!(text.contains("Number of transmit antennas"));
}

fn reproduce(figure: &str, trials: &str, dir: &Path) -> String {
    let out = tasrate(&[
        "reproduce",
        figure,
        "--trials",
        trials,
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(dir.join(format!("{figure}.svg"))).unwrap();
    assert!(svg.contains("</svg>"));
    fs::read_to_string(dir.join(format!("{figure}.csv"))).unwrap()
}

#[test]
fn fig3b_selection_gain_over_single_antenna() {
    let dir = tempfile::tempdir().unwrap();
    let csv = reproduce("fig3b", "20000", dir.path());
    let rows = rows(&csv);
    assert_eq!(rows.len(), 64 * 3 * 3);
    let siso = rate(&rows, "12", "exact_siso/b=3");
    let analytic = rate(&rows, "12", "cor1/b=3") / siso;
    let simulated = rate(&rows, "12", "mc_exact/b=3") / siso;
    assert!((1.80..=1.95).contains(&analytic), "{analytic}");
    assert!((1.80..=1.95).contains(&simulated), "{simulated}");
    assert!((simulated - 1.87).abs() < 0.02, "{simulated}");
}

#[test]
fn fig2a_has_five_simulated_and_five_bound_curves() {
    let dir = tempfile::tempdir().unwrap();
    let csv = reproduce("fig2a", "1000", dir.path());
    let rows = rows(&csv);
    let mut series: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    series.sort();
    series.dedup();
    assert_eq!(series.len(), 10);
    assert_eq!(series.iter().filter(|s| s.starts_with("mc_exact/")).count(), 5);
    assert_eq!(series.iter().filter(|s| s.starts_with("lb_thm1/")).count(), 5);
    assert_eq!(rows.len(), 17 * 10);
    assert!(rows
        .iter()
        .filter(|r| r[2].starts_with("lb_thm1"))
        .all(|r| r[4].is_empty() && r[5].is_empty()));
}

#[test]
fn fit_report_for_one_and_eight_antennas() {
    let one = String::from_utf8(tasrate(&["fit", "--nr", "1", "--samples", "10000"]).stdout).unwrap();
    assert!(one.contains("k = 0.500000000000"));
    assert!(one.contains("mu = 1.000000000000"));
    assert!(one.contains("omega = 1.000000000000") || one.contains("omega = 0.999999999999"));
    let eight = String::from_utf8(tasrate(&["fit", "--nr", "8", "--samples", "0"]).stdout).unwrap();
    let residuals = eight.lines().find(|l| l.starts_with("residuals")).unwrap();
    for r in residuals.trim_start_matches("residuals = ").split(", ") {
        assert!(r.parse::<f64>().unwrap().abs() < 1e-8);
    }
}
