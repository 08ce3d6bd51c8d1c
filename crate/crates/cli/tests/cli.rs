use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use angio_cli::{render_svg, HistoryConfig, Scenario, SweepGrid};
use angio_core::analysis::analyze;
use angio_core::{ModelParams, Rate, StabilityReport, Verdict};
use tempfile::TempDir;

fn angio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_angio"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

const MODEL1: &str = r#"{
  "params": { "model": "model1", "alpha": 1.0, "beta": 2.0, "gamma": 0.1, "delta": 1.0 },
  "schedule": { "p": { "kind": "constant", "value": 0.0 }, "c": { "kind": "constant", "value": 0.1 } },
  "delay": { "kind": "constant", "tau": 1.0 },
  "t_span": [0.0, 200.0]
}"#;

/// `((beta e^{-p0/alpha} - gamma - c0) / delta)^{3/2}` and `K* = x*`.
fn model1_star(alpha: f64, beta: f64, gamma: f64, delta: f64, p0: f64, c0: f64) -> (f64, f64) {
    let eta = beta * (-p0 / alpha).exp();
    let x = ((eta - gamma - c0) / delta).powf(1.5);
    (x, x * (p0 / alpha).exp())
}

#[test]
fn equilibrium_start_stays_at_rest() {
    let dir = TempDir::new().unwrap();
    let mut scenario = Scenario::from_json(MODEL1).unwrap();
    scenario.history = HistoryConfig::EquilibriumOffset {
        x_scale: 1.0,
        k_scale: 1.0,
    };
    let path = write(&dir, "eq.json", &scenario.to_json());
    let out = dir.path().join("traj.csv");
    let run = angio(&["simulate", s(&path), "--out", s(&out)]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let (x_star, _) = model1_star(1.0, 2.0, 0.1, 1.0, 0.0, 0.1);
    let data = rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(data.last().unwrap()[0], 200.0);
    for row in &data {
        assert!((row[1] - x_star).abs() < 1e-8, "{row:?}");
    }
}

#[test]
fn perturbed_model1_run_settles() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "m1.json", MODEL1);
    let out = dir.path().join("traj.csv");
    assert!(angio(&["simulate", s(&path), "--out", s(&out)])
        .status
        .success());
    let data = rows(&fs::read_to_string(&out).unwrap());
    let (x_star, k_star) = model1_star(1.0, 2.0, 0.1, 1.0, 0.0, 0.1);
    assert_eq!(data[0][1], 1.1 * x_star);
    let last = data.last().unwrap();
    assert_eq!(last[0], 200.0);
    assert!(
        (last[1] - x_star).abs() < 1e-4 && (last[2] - k_star).abs() < 1e-4,
        "{last:?}"
    );
    assert_eq!((last[3], last[4]), (0.0, 0.1));
}

#[test]
fn output_stride_keeps_the_final_row() {
    let dir = TempDir::new().unwrap();
    let mut scenario = Scenario::from_json(MODEL1).unwrap();
    scenario.t_span = [0.0, 1.05];
    let full = rows(
        &String::from_utf8(
            angio(&["simulate", s(&write(&dir, "a.json", &scenario.to_json()))]).stdout,
        )
        .unwrap(),
    );
    scenario.output.stride = 4;
    let strided = rows(
        &String::from_utf8(
            angio(&["simulate", s(&write(&dir, "b.json", &scenario.to_json()))]).stdout,
        )
        .unwrap(),
    );
    let mut expected: Vec<_> = full.iter().step_by(4).cloned().collect();
    if !(full.len() - 1).is_multiple_of(4) {
        expected.push(full.last().unwrap().clone());
    }
    assert_eq!(strided, expected);
    assert_eq!(strided.last().unwrap()[0], 1.05);
}

#[test]
fn missing_alpha_is_named() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.json", &MODEL1.replace(r#""alpha": 1.0, "#, ""));
    let out = angio(&["simulate", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("alpha") && msg.contains("line"), "{msg}");
}

#[test]
fn unknown_and_invalid_fields_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let typo = write(&dir, "typo.json", &MODEL1.replace("\"gamma\"", "\"gama\""));
    let out = angio(&["analyze", s(&typo)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gama"));
    let negative = write(
        &dir,
        "neg.json",
        &MODEL1.replace("\"tau\": 1.0", "\"tau\": -1.0"),
    );
    assert_eq!(angio(&["simulate", s(&negative)]).status.code(), Some(1));
    assert_eq!(
        angio(&["simulate", "/nonexistent/scenario.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn fault_keeps_partial_csv_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let params = ModelParams::model3(2.0, 3.0, 0.1, 1.0, 3.0);
    let eq = angio_core::analysis::equilibrium(&params, 0.0, 0.1).unwrap();
    let mut scenario = Scenario::from_json(MODEL1).unwrap();
    scenario.params = params;
    scenario.delay = angio_cli::DelayConfig::Constant { tau: 5.0 };
    scenario.history = HistoryConfig::Constant {
        x: eq.x_star * 3f64.exp(),
        k: eq.k_star,
    };
    scenario.t_span = [0.0, 10.0];
    let path = write(&dir, "stiff.json", &scenario.to_json());
    let out = dir.path().join("partial.csv");
    let run = angio(&["simulate", s(&path), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("positivity fault at t = "));
    let data = rows(&fs::read_to_string(&out).unwrap());
    assert!(!data.is_empty() && data.last().unwrap()[0] < 10.0);
    assert!(data.iter().all(|r| r[1] > 0.0 && r[2] > 0.0));
}

fn analyze_cli(dir: &TempDir, scenario: &Scenario) -> StabilityReport {
    let path = write(dir, "a.json", &scenario.to_json());
    let out = angio(&["analyze", s(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["theorem", "condition_values", "verdict"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    serde_json::from_value(value).unwrap()
}

#[test]
fn analyze_reports_match_the_library() {
    let dir = TempDir::new().unwrap();
    let base = Scenario::from_json(MODEL1).unwrap();
    let mut model2 = base.clone();
    model2.params = ModelParams::model2(1.0, 2.2, 0.1, 1.0);
    let mut marginal = base.clone();
    marginal.params.beta = 0.2;
    marginal.history = HistoryConfig::Constant { x: 1.0, k: 1.0 };
    for (scenario, verdict) in [
        (base, Verdict::CertifiedStable),
        (model2, Verdict::NotCertified),
        (marginal, Verdict::NoEquilibrium),
    ] {
        let report = analyze_cli(&dir, &scenario);
        assert_eq!(report.verdict, verdict);
        let direct = analyze(
            &scenario.params,
            &scenario.schedule,
            &scenario.delay.build().unwrap(),
        )
        .unwrap();
        assert_eq!(report, direct);
    }
}

#[test]
fn analyze_writes_to_out() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "m1.json", MODEL1);
    let out = dir.path().join("report.json");
    assert!(angio(&["analyze", s(&path), "--out", s(&out)])
        .status
        .success());
    let report: StabilityReport = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(report.is_certified());
}

#[test]
fn scenario_round_trip() {
    let text = r#"{
      "params": { "model": "model3", "alpha": 1.5, "beta": 2.0, "gamma": 0.1, "delta": 0.7, "richards_m": 2.0 },
      "schedule": {
        "p": { "kind": "exp_decay", "limit": 0.1, "amplitude": 0.5, "rate": 0.3 },
        "c": { "kind": "pharmacokinetic", "dose": { "kind": "constant", "value": 0.2 }, "decay": 2.0, "initial": 0.0 }
      },
      "delay": { "kind": "sinusoidal", "mean": 1.0, "amplitude": 0.25, "omega": 0.5 },
      "history": { "kind": "constant", "x": 0.3, "K": 0.9 },
      "t_span": [0.0, 50.0],
      "integrator": { "max_step": 0.05, "positivity_mode": "log_coords" },
      "output": { "stride": 3, "trajectory": "out/traj.csv" }
    }"#;
    for text in [text, MODEL1] {
        let scenario = Scenario::from_json(text).unwrap();
        scenario.validate().unwrap();
        let again = Scenario::from_json(&scenario.to_json()).unwrap();
        assert_eq!(again, scenario);
        assert_eq!(again.to_json(), scenario.to_json());
    }
}

fn grid(axes: &str, extra: &str) -> String {
    format!(r#"{{ "base": {MODEL1}, "axes": {axes}{extra} }}"#)
}

fn sweep_rows(dir: &TempDir, text: &str, jobs: &str) -> (String, Vec<Vec<String>>) {
    let path = write(dir, "grid.json", text);
    let out = angio(&["sweep", s(&path), "--jobs", jobs]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (csv, rows)
}

#[test]
fn two_by_two_grid_has_four_rows() {
    let dir = TempDir::new().unwrap();
    let text = grid(
        r#"[{"name": "beta", "values": [1.0, 2.0]}, {"name": "tau", "values": [0.5, 1.0]}]"#,
        "",
    );
    let (csv, rows) = sweep_rows(&dir, &text, "2");
    assert_eq!(
        csv.lines().next(),
        Some("beta,tau,verdict,metric,converged,fault")
    );
    assert_eq!(rows.len(), 4);
    let order: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r[0].as_str(), r[1].as_str()))
        .collect();
    assert_eq!(
        order,
        [
            ("1.0", "0.5"),
            ("1.0", "1.0"),
            ("2.0", "0.5"),
            ("2.0", "1.0")
        ]
    );
}

#[test]
fn verdict_flips_at_the_existence_threshold() {
    let dir = TempDir::new().unwrap();
    let (alpha, gamma, c0, p0): (f64, f64, f64, f64) = (1.0, 0.1, 0.1, 0.5);
    let threshold = (gamma + c0) * (p0 / alpha).exp();
    let betas = [0.5, 0.9, 1.0 - 1e-9, 1.0 + 1e-9, 1.1, 2.0].map(|f| f * threshold);
    let values: Vec<String> = betas.iter().map(|b| format!("{b:?}")).collect();
    let mut base = Scenario::from_json(MODEL1).unwrap();
    base.schedule.p = Rate::constant(p0);
    base.history = HistoryConfig::Constant { x: 1.0, k: 1.0 };
    base.t_span = [0.0, 20.0];
    let text = format!(
        r#"{{ "base": {}, "axes": [{{"name": "beta", "values": [{}]}}] }}"#,
        base.to_json(),
        values.join(", ")
    );
    let (_, rows) = sweep_rows(&dir, &text, "3");
    for (row, beta) in rows.iter().zip(betas) {
        let expected = if beta > threshold {
            "CertifiedStable"
        } else {
            "NoEquilibrium"
        };
        assert_eq!(row[1], expected, "beta = {beta}");
    }
}

#[test]
fn certified_grid_converges_at_default_horizon() {
    let dir = TempDir::new().unwrap();
    let mut base = Scenario::from_json(MODEL1).unwrap();
    base.t_span = [0.0, 500.0];
    let text = format!(
        r#"{{ "base": {}, "axes": [{{"name": "beta", "values": [1.0, 2.0, 3.0]}}, {{"name": "tau", "values": [0.5, 1.0, 2.0]}}, {{"name": "c0", "values": [0.0, 0.2]}}] }}"#,
        base.to_json()
    );
    let (_, rows) = sweep_rows(&dir, &text, "4");
    assert_eq!(rows.len(), 18);
    for row in rows {
        assert_eq!(row[3], "CertifiedStable", "{row:?}");
        assert_eq!(row[5], "true", "{row:?}");
        assert!(row[6].is_empty());
    }
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let text = grid(
        r#"[{"name": "alpha", "values": [0.5, 1.0, 2.0]}, {"name": "beta", "values": [0.15, 0.5, 3.0]}, {"name": "tau", "values": [0.5, 4.0]}]"#,
        "",
    );
    let (a, _) = sweep_rows(&dir, &text, "1");
    let (b, _) = sweep_rows(&dir, &text, "8");
    let (c, _) = sweep_rows(&dir, &text, "8");
    assert_eq!(a, b);
    assert_eq!(b, c);
}

#[test]
fn sweep_rejects_oversized_and_unknown_axes() {
    let dir = TempDir::new().unwrap();
    let over = write(
        &dir,
        "over.json",
        &grid(
            r#"[{"name": "beta", "values": [1.0, 2.0]}, {"name": "tau", "values": [0.5, 1.0]}]"#,
            r#", "cap": 3"#,
        ),
    );
    let out = angio(&["sweep", s(&over)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    let unknown = write(
        &dir,
        "unknown.json",
        &grid(r#"[{"name": "betta", "values": [1.0]}]"#, ""),
    );
    assert_eq!(angio(&["sweep", s(&unknown)]).status.code(), Some(1));
    let invalid = write(
        &dir,
        "invalid.json",
        &grid(r#"[{"name": "alpha", "values": [1.0, -1.0]}]"#, ""),
    );
    assert_eq!(angio(&["sweep", s(&invalid)]).status.code(), Some(1));
}

#[test]
fn grid_points_are_row_major() {
    let grid = SweepGrid::from_json(&grid(
        r#"[{"name": "beta", "values": [1.0, 2.0, 3.0]}, {"name": "gamma", "values": [0.1, 0.2]}]"#,
        "",
    ))
    .unwrap();
    assert_eq!(grid.size(), Some(6));
    let points = grid.points();
    assert_eq!(points[0], [1.0, 0.1]);
    assert_eq!(points[1], [1.0, 0.2]);
    assert_eq!(points[5], [3.0, 0.2]);
    assert_eq!(grid.scenario_at(&points[3]).unwrap().params.beta, 2.0);
}

#[test]
fn plot_is_well_formed_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "m1.json", MODEL1);
    let traj = dir.path().join("traj.csv");
    assert!(angio(&["simulate", s(&path), "--out", s(&traj)])
        .status
        .success());
    let (one, two) = (dir.path().join("one.svg"), dir.path().join("two.svg"));
    assert!(angio(&["plot", s(&traj), "--out", s(&one)])
        .status
        .success());
    assert!(angio(&["plot", s(&traj), "--out", s(&two)])
        .status
        .success());
    let svg = fs::read(&one).unwrap();
    assert_eq!(svg, fs::read(&two).unwrap());
    let text = String::from_utf8(svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let polylines = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .count();
    assert_eq!(polylines, 2);
    let labels: Vec<&str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("text"))
        .filter_map(|n| n.text())
        .collect();
    assert!(labels.contains(&"t") && labels.contains(&"x, K"));
}

#[test]
fn plot_rejects_empty_and_malformed_csv() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.csv", "t,x,K,p,c\n");
    assert_eq!(angio(&["plot", s(&empty)]).status.code(), Some(1));
    let bad = write(&dir, "bad.csv", "t,x,K,p,c\n0.0,1.0,oops,0.0,0.0\n");
    assert_eq!(angio(&["plot", s(&bad)]).status.code(), Some(1));
    assert!(render_svg("t,y\n0,1\n").is_err());
    assert!(render_svg("t,x,K\n0,1,1\n").is_ok());
}
