//! End-to-end runs of the installed binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harq-outage"))
        .args(args)
        .env_remove("HARQ_OUTAGE_THREADS")
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, Option<String>) {
    let path = dir.join(name);
    let mut argv = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    argv.extend(["--out", &p]);
    let out = run(&argv);
    (out.status.code().unwrap(), std::fs::read_to_string(&path).ok())
}

fn parse(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn figure_five_columns_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "f5.csv", &["figure", "5", "--eps", "0.01", "--snr", "0:40:1", "--M", "1,2,6"]);
    assert_eq!(code, 0);
    let csv = csv.unwrap();
    assert!(!csv.contains('\r'));
    let (header, rows) = parse(&csv);
    assert_eq!(header, ["snr_db", "ergodic", "c_ir_2", "c_ir_6", "c_eps_1", "c_eps_2", "c_eps_6"]);
    assert_eq!(rows.len(), 41);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<f64>().unwrap(), i as f64);
        assert!(row.iter().all(|c| c.parse::<f64>().unwrap().is_finite()));
        let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        // ergodic > IR-6 > IR-2 and IR-M >= fixed-length M.
        assert!(v[1] > v[3] && v[3] > v[2] && v[2] >= v[5] && v[3] >= v[6]);
    }
}

#[test]
fn compare_reports_one_consistent_row() {
    let out = run(&["compare", "--protocol", "ir", "--M", "2", "--eps", "0.01", "--snr", "10", "--messages", "1000000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    let col = |name: &str| rows[0][header.iter().position(|h| h == name).unwrap()].clone();
    assert_eq!(col("protocol"), "ir");
    assert_eq!(col("seed"), "7");
    let z: f64 = col("z_rate").parse().unwrap();
    assert!(z.abs() < 3.0);
    let ci: f64 = col("sim_ci95_rate").parse().unwrap();
    assert!(ci > 0.0);
}

#[test]
fn usage_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["capacity", "--snr", "10:0:1"][..],
        &["capacity", "--snr", "0:10:0"],
        &["harq-ir", "--M", "0"],
        &["harq-ir", "--eps", "1.5"],
        &["figure", "12"],
        &["figure", "5", "--eps", "0.01,0.1"],
        &["simulate", "--messages", "0"],
        &["simulate", "--protocol", "xx"],
        &["nonsense"],
    ] {
        let (code, csv) = run_to(dir.path(), "bad.csv", args);
        assert_eq!(code, 2, "{args:?}");
        assert!(csv.is_none(), "{args:?} wrote a file");
    }
    let missing = dir.path().join("no/such/dir/out.csv");
    let out = run(&["capacity", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["figure", "--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "x.csv", &["harq-ir", "--snr", "-400"]);
    assert_eq!(code, 1);
    assert!(csv.is_none());
}

#[test]
fn negative_gaussian_capacity_is_flagged_not_clamped() {
    let out = run(&["capacity", "--snr", "0", "--L", "1", "--eps", "0.01"]);
    let (header, rows) = parse(&String::from_utf8(out.stdout).unwrap());
    let col = |name: &str| rows[0][header.iter().position(|h| h == name).unwrap()].clone();
    assert!(col("gaussian_approx").parse::<f64>().unwrap() < 0.0);
    assert_eq!(col("gaussian_negative"), "1");
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sim = ["simulate", "--protocol", "ir", "--M", "2,3", "--snr", "0,10,20", "--messages", "100000", "--seed", "42"];
    let mut a = sim.to_vec();
    a.extend(["--threads", "1"]);
    let mut b = sim.to_vec();
    b.extend(["--threads", "8"]);
    let first = run_to(dir.path(), "a.csv", &a);
    assert_eq!(first.0, 0);
    assert_eq!(first, run_to(dir.path(), "b.csv", &b));
    assert_eq!(first, run_to(dir.path(), "c.csv", &a));

    let env = Command::new(env!("CARGO_BIN_EXE_harq-outage"))
        .args(sim)
        .env("HARQ_OUTAGE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(Some(String::from_utf8(env.stdout).unwrap()), first.1);
}

#[test]
fn analytic_commands_produce_documented_columns() {
    for (args, columns) in [
        (&["capacity", "--snr", "0:20:10", "--L", "1,3", "--samples", "20000"][..], 6),
        (&["harq-ir", "--snr", "10", "--M", "2", "--optimize"], 1),
        (&["harq-cc", "--snr", "10,30", "--M", "2,4"], 4),
        (&["optimize", "--protocol", "cc", "--snr", "30"], 1),
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let (header, rows) = parse(&String::from_utf8(out.stdout).unwrap());
        assert_eq!(header[0], "snr_db");
        assert_eq!(rows.len(), columns, "{args:?}");
        assert!(rows.iter().all(|r| r.len() == header.len()));
    }
}

#[test]
fn every_figure_preset_runs() {
    let small: [&[&str]; 11] = [
        &["figure", "1", "--L", "1,5"],
        &["figure", "2", "--snr", "10", "--L", "2"],
        &["figure", "3", "--snr", "0,20"],
        &["figure", "4", "--L", "8,16"],
        &["figure", "5", "--snr", "10", "--messages", "20000"],
        &["figure", "6", "--M", "2,10"],
        &["figure", "7", "--snr", "10"],
        &["figure", "8", "--snr", "30", "--M", "2"],
        &["figure", "9", "--snr", "30"],
        &["figure", "10", "--snr", "10", "--eps", "0.01,0.2"],
        &["figure", "11", "--snr", "0,30"],
    ];
    for args in small {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let (header, rows) = parse(&String::from_utf8(out.stdout).unwrap());
        assert_eq!(header[0], "snr_db");
        assert!(!rows.is_empty());
    }
}
