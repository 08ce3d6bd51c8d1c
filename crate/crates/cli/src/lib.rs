//! Front end for the `angio` binary: scenario files in, CSV, JSON and SVG out.

pub mod plot;
pub mod scenario;
pub mod sweep;

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use angio_core::analysis::analyze;
use angio_core::{integrate, IntegrateError, ModelProblem, StabilityReport, Trajectory};
use thiserror::Error;

pub use plot::render_svg;
pub use scenario::{DelayConfig, HistoryConfig, OutputConfig, Scenario};
pub use sweep::{Axis, SweepGrid, SweepRow};

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid configuration or data.
    #[error("{0}")]
    Input(String),
    /// The integrator halted; any partial output has been written.
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 1,
        }
    }

    pub(crate) fn context(self, path: &Path) -> Self {
        match self {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        }
    }
}

/// Formats a float so that parsing the text gives back the same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Outcome of [`simulate`]: the trajectory reached `T`, or stopped early.
pub struct Simulation {
    pub trajectory: Trajectory<2>,
    pub fault: Option<angio_core::Fault>,
}

/// Runs a validated scenario. A fault is not an error here: the partial
/// trajectory is returned with it.
pub fn simulate(scenario: &Scenario) -> Result<Simulation, CliError> {
    let prepared = scenario.prepare()?;
    let problem = ModelProblem::new(scenario.params, scenario.schedule.clone(), prepared.delay);
    let span = (scenario.t_span[0], scenario.t_span[1]);
    match integrate(&problem, &prepared.history, span, &scenario.integrator) {
        Ok(trajectory) => Ok(Simulation {
            trajectory,
            fault: None,
        }),
        Err(IntegrateError::Halted { fault, partial }) => Ok(Simulation {
            trajectory: *partial,
            fault: Some(fault),
        }),
        Err(IntegrateError::Invalid(e @ angio_core::Error::Domain(_))) => {
            Err(CliError::Numerical(e.to_string()))
        }
        Err(IntegrateError::Invalid(e)) => Err(CliError::Input(e.to_string())),
    }
}

/// `t,x,K,p,c` rows for every `stride`-th knot and the last one.
pub fn trajectory_csv(scenario: &Scenario, traj: &Trajectory<2>) -> String {
    let stride = scenario.output.stride.max(1);
    let last = traj.len().saturating_sub(1);
    let mut out = String::from("t,x,K,p,c\n");
    for (i, (t, y)) in traj.knots().enumerate() {
        if i % stride != 0 && i != last {
            continue;
        }
        let (p, c) = scenario.schedule.rates(t);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(t),
            fmt_f64(y[0]),
            fmt_f64(y[1]),
            fmt_f64(p),
            fmt_f64(c)
        );
    }
    out
}

/// The analysis verdict for a scenario, unchanged.
pub fn analyze_scenario(scenario: &Scenario) -> Result<StabilityReport, CliError> {
    let delay = scenario.model_spec()?;
    analyze(&scenario.params, &scenario.schedule, &delay)
        .map_err(|e| CliError::Input(e.to_string()))
}

pub fn cmd_simulate(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let scenario = Scenario::load(path)?;
    let sim = simulate(&scenario)?;
    let out = out.or(scenario.output.trajectory.as_deref());
    emit(out, &trajectory_csv(&scenario, &sim.trajectory))?;
    match sim.fault {
        None => Ok(()),
        Some(fault) => Err(CliError::Numerical(format!(
            "{fault}; trajectory kept up to t = {}",
            sim.trajectory.t_end()
        ))),
    }
}

pub fn cmd_analyze(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let scenario = Scenario::load(path)?;
    let report = analyze_scenario(&scenario)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(out.or(scenario.output.report.as_deref()), &json)
}

pub fn cmd_sweep(path: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<(), CliError> {
    let grid = SweepGrid::load(path)?;
    let rows = grid.run(jobs)?;
    emit(out, &sweep::rows_csv(&grid, &rows))
}

pub fn cmd_plot(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = scenario::read(path)?;
    let svg = render_svg(&text).map_err(|e| e.context(path))?;
    emit(out, &svg)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}
