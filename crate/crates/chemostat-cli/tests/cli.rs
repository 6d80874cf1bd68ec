//! End-to-end runs of the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn write_config(dir: &Path, operating: &str, extra: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    let body = format!("{{ \"operating\": {operating}{extra} }}");
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemostat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn steady_states_at_bistable_point_lists_four_states() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":0.5}"#, "");
    let out = run(&[
        "steady-states",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(tmp.path().join("steady_states.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let star = rows.iter().find(|r| r.starts_with("E*")).unwrap();
    let fields: Vec<&str> = star.split(',').collect();
    assert!((fields[1].parse::<f64>().unwrap() - 0.5181).abs() < 1e-3);
    assert!((fields[2].parse::<f64>().unwrap() - 0.1491).abs() < 1e-3);
    assert!((fields[3].parse::<f64>().unwrap() - 0.2371).abs() < 1e-3);
    assert_eq!(fields[4], "U");
    assert_eq!(fields[5], "J3");

    // stdout repeats the CSV rows verbatim
    let text = stdout(&out);
    for row in rows {
        assert!(text.contains(row), "stdout missing row {row}");
    }
}

#[test]
fn steady_states_above_washout_threshold_is_e0_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":5.0}"#, "");
    let out = run(&[
        "steady-states",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("steady_states.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("E0"));
    assert!(rows[0].contains(",S,"));
}

#[test]
fn zero_feed_point_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":0.0,"d":0.5}"#, "");
    let out = run(&["steady-states", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_mode_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":0.5}"#, "");
    let out = run(&["operating-diagram", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    fs::write(&path, "{ not json").unwrap();
    let out = run(&["steady-states", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_bistable_point_reaches_both_attractors() {
    let tmp = tempfile::tempdir().unwrap();
    let ics = r#","initial_conditions":[[0.1,0.05,0.7],[0.1,0.05,0.05],[1.0,0.3,0.1],
        [0.5,0.5,0.05],[0.2,0.05,0.5],[1.5,0.6,0.1],[0.8,0.05,0.6],[0.3,0.4,0.02]]"#;
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":0.5}"#, ics);
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
        "--format",
        "csv,svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert!(summary.contains("E1") && summary.contains("E2"), "{summary}");
    assert!(tmp.path().join("trajectory_07.csv").exists());
    let svg = fs::read_to_string(tmp.path().join("phase.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn simulate_exclusion_point_always_reaches_e1() {
    let tmp = tempfile::tempdir().unwrap();
    let ics = r#","initial_conditions":[[1.0,0.3,0.1],[0.2,0.5,0.5],[1.5,0.05,0.9],
        [0.6,0.8,0.3]]"#;
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":0.7}"#, ics);
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    for line in summary.lines().skip(1) {
        assert!(line.ends_with(",E1"), "{line}");
    }
}

#[test]
fn simulate_from_washout_state_is_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"mode":"point","s_in":1.0,"d":0.5}"#,
        r#","initial_conditions":[[1.0,0.0,0.0]]"#,
    );
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("trajectory_00.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,S,x1,x2");
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!((v[1] - 1.0).abs() < 1e-9 && v[2] == 0.0 && v[3] == 0.0, "{line}");
    }
}

#[test]
fn operating_diagram_emits_all_regions_and_colored_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"mode":"grid","s_in_min":0.0,"s_in_max":1.0,"d_min":0.0,"d_max":2.0,
            "resolution":[60,60]}"#,
        "",
    );
    let out = run(&[
        "operating-diagram",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
        "--format",
        "csv,svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let regions = fs::read_to_string(tmp.path().join("regions.csv")).unwrap();
    assert_eq!(regions.lines().next().unwrap(), "S_in,D,region");
    assert_eq!(regions.lines().count(), 60 * 60 + 1);
    for label in ["J0", "J1", "J2", "J3", "J4", "J5"] {
        assert!(regions.contains(&format!(",{label}")), "missing {label}");
    }

    let curves = fs::read_to_string(tmp.path().join("curves.csv")).unwrap();
    assert_eq!(curves.lines().next().unwrap(), "curve_id,S_in,D");
    for id in ["U1", "U2", "U1c", "U2c"] {
        assert!(curves.lines().any(|l| l.starts_with(&format!("{id},"))));
    }

    let codim2 = fs::read_to_string(tmp.path().join("codim2.csv")).unwrap();
    assert!(codim2.lines().any(|l| {
        let mut parts = l.split(',');
        matches!(
            (parts.next().and_then(|s| s.parse::<f64>().ok()), parts.next().and_then(|s| s.parse::<f64>().ok())),
            (Some(s_in), Some(d)) if (s_in - 0.418289).abs() < 1e-4 && (d - 0.361063).abs() < 1e-4
        )
    }), "{codim2}");

    let svg = fs::read_to_string(tmp.path().join("diagram.svg")).unwrap();
    for color in ["black", "blue", "red", "magenta", "green", "pink", "yellow"] {
        assert!(svg.contains(color), "missing {color}");
    }
}

#[test]
fn low_feed_window_is_all_washout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"mode":"grid","s_in_min":0.0,"s_in_max":0.05,"d_min":0.5,"d_max":2.0,
            "resolution":[8,8]}"#,
        "",
    );
    let out = run(&[
        "operating-diagram",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let regions = fs::read_to_string(tmp.path().join("regions.csv")).unwrap();
    for line in regions.lines().skip(1) {
        assert!(line.ends_with("J0"), "{line}");
    }
}

#[test]
fn bifurcation_scan_reports_four_sigmas_and_branch_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"mode":"line","s_in":1.0,"d_min":0.05,"d_max":4.95,"samples":50}"#,
        "",
    );
    let out = run(&[
        "bifurcation",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
        "--format",
        "csv,svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let sigma = fs::read_to_string(tmp.path().join("sigma.csv")).unwrap();
    let values: Vec<(f64, &str)> = sigma
        .lines()
        .skip(1)
        .map(|l| {
            let mut parts = l.split(',');
            (parts.next().unwrap().parse().unwrap(), parts.nth(1).unwrap())
        })
        .collect();
    assert_eq!(values.len(), 4);
    let expected = [
        (4.0, "E0=E1"),
        (1.0666, "E0=E2"),
        (0.6447, "E2=E*"),
        (0.352, "E1=E*"),
    ];
    for ((d, pair), (want_d, want_pair)) in values.iter().zip(expected) {
        assert!((d - want_d).abs() < 5e-3, "sigma {d} vs {want_d}");
        assert_eq!(*pair, want_pair);
    }

    // the D = 0.45 sample sits in the bistability region: profiles U,S,S,U
    let branches = fs::read_to_string(tmp.path().join("branches.csv")).unwrap();
    let at_045: Vec<&str> = branches
        .lines()
        .filter(|l| l.split(',').next().unwrap().parse::<f64>().map_or(false, |d| (d - 0.45).abs() < 1e-9))
        .collect();
    assert_eq!(at_045.len(), 4, "{branches}");
    let letter = |kind: &str| {
        at_045
            .iter()
            .find(|l| l.split(',').nth(1) == Some(kind))
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
    };
    assert_eq!(letter("E0"), "U");
    assert_eq!(letter("E1"), "S");
    assert_eq!(letter("E2"), "S");
    assert_eq!(letter("E*"), "U");

    let svg = fs::read_to_string(tmp.path().join("bifurcation.svg")).unwrap();
    assert!(svg.contains("stroke-dasharray"), "no dashed unstable branch");
    assert!(svg.contains("circle"), "no transcritical markers");
}

#[test]
fn empty_scan_line_produces_empty_sigma_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"mode":"line","s_in":0.1,"d_min":1.0,"d_max":5.0,"samples":10}"#,
        "",
    );
    let out = run(&[
        "bifurcation",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let sigma = fs::read_to_string(tmp.path().join("sigma.csv")).unwrap();
    assert_eq!(sigma.lines().count(), 1);
}

#[test]
fn thread_env_var_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":0.5}"#, "");
    let out = Command::new(env!("CARGO_BIN_EXE_chemostat"))
        .args(["steady-states", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()])
        .env("CHEMOSTAT_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_chemostat"))
        .args(["steady-states", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()])
        .env("CHEMOSTAT_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn csv_numbers_use_twelve_significant_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mode":"point","s_in":1.0,"d":0.7}"#, "");
    let out = run(&[
        "steady-states",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("steady_states.csv")).unwrap();
    let e1 = csv.lines().find(|l| l.starts_with("E1")).unwrap();
    let s: &str = e1.split(',').nth(1).unwrap();
    // mantissa carries 12 significant digits in scientific notation
    let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 12, "{s}");
}
