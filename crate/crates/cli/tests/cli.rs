use std::path::PathBuf;
use std::process::{Command, Output};

fn twinbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinbeam")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = twinbeam(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV document, split on commas (no field here is quoted).
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twinbeam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["fidelity", "--grid", "lambda=0:0.99:20"][..],
        &["bell", "--test", "onoff", "--grid", "J=0.01:1:5:log", "--grid", "r=0:2:5"],
        &["sweep", "--objective", "bell_dp_twb", "--J", "0.0016", "--grid", "r=0.05:3:10", "--refine", "r=0.01:5"],
        &["energy", "--format", "json", "--grid", "T=0:1:7"],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn twin_beam_fidelity_starts_at_one_half() {
    let (h, rows) = rows(&stdout(&["fidelity", "--grid", "lambda=0:0.99:100"]));
    let (l, f) = (column(&h, "lambda"), column(&h, "f_twb"));
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0][l], "0");
    assert_eq!(rows[0][f], "0.5");
}

#[test]
fn low_transmissivity_never_helps_fidelity() {
    let (h, rows) = rows(&stdout(&["fidelity", "--T", "0.4", "--grid", "lambda=0.01:0.99:50"]));
    let (a, b) = (column(&h, "f_twb"), column(&h, "f_ips"));
    for row in rows {
        let (twb, ips): (f64, f64) = (row[a].parse().unwrap(), row[b].parse().unwrap());
        assert!(ips <= twb, "{row:?}");
    }
}

#[test]
fn zero_displacement_parity_test_is_finite_and_local() {
    let (h, rows) = rows(&stdout(&["bell", "--test", "dp", "--J", "0", "--grid", "r=0.1:3:30"]));
    let (b, v) = (column(&h, "B"), column(&h, "violated"));
    for row in rows {
        let value: f64 = row[b].parse().unwrap();
        assert!(value.is_finite() && value <= 2.0, "{row:?}");
        assert_eq!(row[v], "false");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| twinbeam(args).status.code().unwrap();
    assert_eq!(code(&["fidelity", "--eps", "2"]), 2);
    assert_eq!(code(&["fidelity", "--r", "0.5", "--lambda", "0.4"]), 2);
    assert_eq!(code(&["bell", "--test", "nope"]), 2);
    assert_eq!(code(&["run", "/nonexistent/config.toml"]), 2);
    assert_eq!(code(&["oracle-check", "--point", "0.3,0.9,1", "--memory-budget-mb", "1"]), 2);
    assert_eq!(code(&["oracle-check", "--point", "0,0.9,1", "--skip-fidelity"]), 3);
    assert_eq!(code(&["sweep", "--objective", "bell_dp_ips", "--r", "0", "--grid", "T=0.5:0.9:2", "--refine", "T=0.1:0.9"]), 3);
    assert_eq!(code(&["oracle-check", "--point", "0.3,0.9,1", "--skip-fidelity"]), 0);
    assert_eq!(code(&["oracle-check", "--point", "0.3,0.9,1", "--skip-fidelity", "--inject-sign-error"]), 4);
}

#[test]
fn unknown_config_field_is_named() {
    let path = scratch("bad.toml");
    std::fs::write(&path, "command = \"bell\"\nsqueezing = 1.0\n").unwrap();
    let out = twinbeam(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("squeezing"));
}

#[test]
fn oracle_check_reports_each_quantity() {
    let text = stdout(&["oracle-check", "--point", "0.5,0.9,1", "--skip-fidelity"]);
    let reports: serde_json::Value = serde_json::from_str(&text).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 13);
    for r in reports {
        assert_eq!(r["pass"], true, "{r}");
        assert_eq!(r["converged"], true, "{r}");
    }
}

#[test]
fn sweep_writes_the_optimum_beside_the_table() {
    let out = scratch("onoff.csv");
    stdout(&[
        "sweep",
        "--objective",
        "bell_onoff_ips",
        "--T",
        "0.9999",
        "--grid",
        "J=0.05:0.5:4:log",
        "--grid",
        "r=0.1:1:4",
        "--refine",
        "J=0.01:1:log",
        "--refine",
        "r=0.01:2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (h, rows) = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 16);
    let best = rows.iter().map(|r| r[column(&h, "bell_onoff_ips")].parse::<f64>().unwrap()).fold(f64::MIN, f64::max);
    let side = out.with_extension("optimum.json");
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
    assert_eq!(rep["grid_points"], 16);
    assert!((rep["grid_best"].as_f64().unwrap() - best).abs() < 1e-9);
    assert_eq!(rep["report"]["converged"], true);
    let value = rep["report"]["value"].as_f64().unwrap();
    assert!(value >= best && (value - 2.5276).abs() < 0.01, "{value}");
}
