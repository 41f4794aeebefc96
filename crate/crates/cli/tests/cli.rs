use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rpo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rpo"))
}

fn scenario_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/reference_mission.json")
}

fn text(o: &Output) -> (String, String) {
    (
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(scenario_path()).unwrap()).unwrap();
    edit(&mut v);
    let p = dir.join("scenario.json");
    std::fs::write(&p, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    p
}

/// Column `name` of a CSV file as numbers.
fn column(path: &Path, name: &str) -> Vec<f64> {
    let body = std::fs::read_to_string(path).unwrap();
    let mut lines = body.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn run_mission_writes_report_with_four_phases() {
    let out = tempfile::tempdir().unwrap();
    let o = rpo()
        .args(["run-mission", "--config"])
        .arg(scenario_path())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{:?}", text(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap()).unwrap();
    let phases = report["phases"].as_array().unwrap();
    assert_eq!(phases.len(), 4);
    let total = report["delta_v_total_m_s"].as_f64().unwrap();
    assert!((20.0..=40.0).contains(&total), "{total}");
    let sum: f64 = phases.iter().map(|p| p["delta_v_m_s"].as_f64().unwrap()).sum();
    assert!((sum - total).abs() < 1e-9);
    for f in ["states.csv", "elements.csv", "schedule.csv"] {
        assert!(out.path().join(f).exists());
    }
    let labels: Vec<String> = std::fs::read_to_string(out.path().join("schedule.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert!(labels
        .iter()
        .all(|l| l == "raan" || l == "approach" || l == "ellipse_setup"));
}

#[test]
fn output_dir_falls_back_to_environment() {
    let out = tempfile::tempdir().unwrap();
    let cfg = write_config(out.path(), |v| {
        v["commissioning_days"] = 0.0.into();
        v["circumnavigation_days"] = 0.5.into();
    });
    let target = out.path().join("from-env");
    let o = rpo()
        .args(["run-mission", "--config"])
        .arg(&cfg)
        .env("RPO_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{:?}", text(&o));
    assert!(target.join("report.json").exists());
}

#[test]
fn missing_config_names_the_path() {
    let o = rpo()
        .args(["run-mission", "--config", "/nonexistent/scenario.json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(text(&o).1.contains("/nonexistent/scenario.json"));
}

#[test]
fn bad_config_lists_key_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |v| {
        v["spacecraft"]["thrust_n"] = (-1.0).into();
        v["nav"]["period_min"] = (-5.0).into();
    });
    let o = rpo()
        .args(["propagate", "--days", "1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = text(&o).1;
    assert!(
        err.contains("spacecraft.thrust_n") && err.contains("nav.period_min"),
        "{err}"
    );

    let cfg = write_config(dir.path(), |v| {
        v["nav"]["latency"] = 3.into();
    });
    let o = rpo()
        .args(["propagate", "--days", "1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = text(&o).1;
    assert!(err.contains("nav") && err.contains("latency"), "{err}");
}

#[test]
fn budget_abort_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |v| {
        v["spacecraft"]["total_impulse_ns"] = 20.0.into();
    });
    let o = rpo()
        .args(["run-mission", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o).1.contains("budget"));
    assert!(dir.path().join("out/report.json").exists());
}

#[test]
fn zero_day_propagation_is_header_only() {
    let out = tempfile::tempdir().unwrap();
    let o = rpo()
        .args(["propagate", "--days", "0", "--no-thrust", "--config"])
        .arg(scenario_path())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{:?}", text(&o));
    let body = std::fs::read_to_string(out.path().join("elements.csv")).unwrap();
    assert_eq!(body.lines().count(), 1);
    assert!(body.starts_with("t_s,target_osc_a_km"));
}

#[test]
fn one_day_osculating_e_oscillates_about_smooth_mean() {
    let out = tempfile::tempdir().unwrap();
    let o = rpo()
        .args(["propagate", "--days", "1", "--config"])
        .arg(scenario_path())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let path = out.path().join("elements.csv");
    let t = column(&path, "t_s");
    let osc = column(&path, "target_osc_e");
    let mean = column(&path, "target_mean_e");
    let mean_range = mean.iter().cloned().fold(f64::MIN, f64::max) - mean.iter().cloned().fold(f64::MAX, f64::min);
    let osc_range = osc.iter().cloned().fold(f64::MIN, f64::max) - osc.iter().cloned().fold(f64::MAX, f64::min);
    assert!(mean_range < 0.05 * osc_range, "{mean_range} vs {osc_range}");
    // Upward crossings of osc - mean; the dominant short-period term in e
    // runs at twice the orbital rate.
    let d: Vec<f64> = osc.iter().zip(&mean).map(|(a, b)| a - b).collect();
    let ups: Vec<f64> = (1..d.len())
        .filter(|&k| d[k - 1] < 0.0 && d[k] >= 0.0)
        .map(|k| t[k])
        .collect();
    let period = 2.0 * std::f64::consts::PI * (6925.68f64.powi(3) / 398_600.441_8).sqrt();
    let spacing = (ups.last().unwrap() - ups[0]) / (ups.len() - 1) as f64;
    let ratio = period / spacing;
    assert!((ratio - ratio.round()).abs() < 0.1 && ratio.round() >= 1.0, "{ratio}");
}

#[test]
fn thirty_day_raan_slope() {
    let out = tempfile::tempdir().unwrap();
    let o = rpo()
        .args(["propagate", "--days", "30", "--config"])
        .arg(scenario_path())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let path = out.path().join("elements.csv");
    let t = column(&path, "t_s");
    let raan = column(&path, "target_mean_raan_deg");
    let mut unwrapped = vec![raan[0]];
    for k in 1..raan.len() {
        let mut d = raan[k] - raan[k - 1];
        d -= 360.0 * (d / 360.0).round();
        unwrapped.push(unwrapped[k - 1] + d);
    }
    let slope = (unwrapped.last().unwrap() - unwrapped[0]) / ((t.last().unwrap() - t[0]) / 86_400.0);
    assert!((slope + 6.12).abs() < 0.06, "{slope}");
}

#[test]
fn plan_inclination_block() {
    let o = rpo()
        .args(["plan-block", "--block", "i", "--delta", "0.02", "--config"])
        .arg(scenario_path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let out = text(&o).0;
    let w_lines = out.lines().filter(|l| l.contains("+W") || l.contains("-W")).count();
    assert!((2..=3).contains(&w_lines), "{out}");
}

#[test]
fn plan_zero_eccentricity_block_is_empty() {
    let o = rpo()
        .args(["plan-block", "--block", "e", "--delta", "0", "--config"])
        .arg(scenario_path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(text(&o).0.contains("empty schedule"));
}

/// Value after `key ` in the `measured change:` line.
fn measured(out: &str, key: &str) -> f64 {
    let line = out.lines().find(|l| l.starts_with("measured change:")).unwrap();
    let rest = &line[line.find(&format!(" {key} ")).unwrap() + key.len() + 2..];
    rest.split([' ', ',']).next().unwrap().parse().unwrap()
}

#[test]
fn executed_eccentricity_block_reaches_target() {
    let o = rpo()
        .args([
            "plan-block",
            "--block",
            "e",
            "--delta",
            "0.001",
            "--execute",
            "--config",
        ])
        .arg(scenario_path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{:?}", text(&o));
    let out = text(&o).0;
    let de = measured(&out, "de");
    let da = measured(&out, "da");
    assert!((de - 0.001).abs() < 1e-4, "{out}");
    assert!(da.abs() < 0.5, "{out}");
}
