//! Cartesian parameter grids over a base scenario.

use std::path::Path;

use angio_core::engine::DEFAULT_TAIL_FRACTION;
use angio_core::{convergence_metric, Rate, Verdict};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scenario::{parse_json, read, DelayConfig, Scenario};
use crate::{analyze_scenario, fmt_f64, simulate, CliError};

pub const DEFAULT_CAP: u64 = 1_000_000;

/// Tail deviation below which a run counts as converged.
pub const CONVERGED_BELOW: f64 = 1e-4;

/// Names an axis may sweep.
pub const AXIS_NAMES: [&str; 8] = [
    "alpha",
    "beta",
    "gamma",
    "delta",
    "richards_m",
    "p0",
    "c0",
    "tau",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub base: Scenario,
    /// The first axis varies slowest.
    pub axes: Vec<Axis>,
    #[serde(default = "default_cap")]
    pub cap: u64,
}

fn default_cap() -> u64 {
    DEFAULT_CAP
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub verdict: Verdict,
    /// `None` when there is no equilibrium to measure against or the run faulted.
    pub metric: Option<f64>,
    pub fault: Option<angio_core::Fault>,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.metric.is_some_and(|m| m < CONVERGED_BELOW)
    }
}

impl SweepGrid {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        parse_json(&read(path)?).map_err(|e| e.context(path))
    }

    pub fn size(&self) -> Option<u64> {
        self.axes
            .iter()
            .try_fold(1u64, |acc, a| acc.checked_mul(a.values.len() as u64))
    }

    /// Grid points in row-major order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    fn check(&self) -> Result<(), CliError> {
        for (i, axis) in self.axes.iter().enumerate() {
            if !AXIS_NAMES.contains(&axis.name.as_str()) {
                return Err(CliError::Input(format!(
                    "axes[{i}]: unknown parameter `{}`, expected one of {}",
                    axis.name,
                    AXIS_NAMES.join(", ")
                )));
            }
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(CliError::Input(format!(
                    "axes[{i}]: `{}` appears twice",
                    axis.name
                )));
            }
            if axis.values.is_empty() {
                return Err(CliError::Input(format!(
                    "axes[{i}]: `{}` has no values",
                    axis.name
                )));
            }
        }
        match self.size() {
            Some(n) if n <= self.cap => Ok(()),
            n => Err(CliError::Input(format!(
                "grid has {} points, cap is {}",
                n.map_or("more than 2^64".into(), |n| n.to_string()),
                self.cap
            ))),
        }
    }

    /// The base scenario with one point's values substituted.
    pub fn scenario_at(&self, point: &[f64]) -> Result<Scenario, CliError> {
        let mut s = self.base.clone();
        for (axis, &v) in self.axes.iter().zip(point) {
            match axis.name.as_str() {
                "alpha" => s.params.alpha = v,
                "beta" => s.params.beta = v,
                "gamma" => s.params.gamma = v,
                "delta" => s.params.delta = v,
                "richards_m" => s.params.richards_m = Some(v),
                "p0" => set_limit(&mut s.schedule.p, v, "p0")?,
                "c0" => set_limit(&mut s.schedule.c, v, "c0")?,
                "tau" => {
                    s.delay = match s.delay {
                        DelayConfig::Sinusoidal {
                            amplitude, omega, ..
                        } => DelayConfig::Sinusoidal {
                            mean: v,
                            amplitude,
                            omega,
                        },
                        _ => DelayConfig::Constant { tau: v },
                    }
                }
                other => unreachable!("axis `{other}` passed the name check"),
            }
        }
        Ok(s)
    }

    /// Validates every point, then evaluates them on `jobs` threads.
    pub fn run(&self, jobs: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
        self.check()?;
        let points = self.points();
        let scenarios = points
            .iter()
            .map(|p| {
                let s = self.scenario_at(p)?;
                s.model_spec()
                    .map_err(|e| at(p, &self.axes, e.to_string()))?;
                Ok(s)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Input(format!("--jobs: {e}")))?;
        pool.install(|| {
            points
                .par_iter()
                .zip(&scenarios)
                .map(|(p, s)| evaluate(p, s).map_err(|e| at(p, &self.axes, e.to_string())))
                .collect()
        })
    }
}

fn set_limit(rate: &mut Rate, v: f64, name: &str) -> Result<(), CliError> {
    match rate {
        Rate::Constant { value } => *value = v,
        Rate::ExpDecay { limit, .. } | Rate::Hyperbolic { limit, .. } => *limit = v,
        _ => {
            return Err(CliError::Input(format!(
                "axis `{name}` needs a constant, exp_decay or hyperbolic rate"
            )))
        }
    }
    Ok(())
}

fn at(point: &[f64], axes: &[Axis], msg: String) -> CliError {
    let coords: Vec<String> = axes
        .iter()
        .zip(point)
        .map(|(a, v)| format!("{} = {v}", a.name))
        .collect();
    CliError::Input(format!("grid point ({}): {msg}", coords.join(", ")))
}

fn evaluate(point: &[f64], s: &Scenario) -> Result<SweepRow, CliError> {
    let verdict = analyze_scenario(s)?.verdict;
    let mut row = SweepRow {
        values: point.to_vec(),
        verdict,
        metric: None,
        fault: None,
    };
    if verdict == Verdict::NoEquilibrium {
        return Ok(row);
    }
    let eq = s.prepare()?.equilibrium;
    match simulate(s) {
        Ok(sim) => {
            row.fault = sim.fault;
            if sim.fault.is_none() {
                row.metric =
                    eq.map(|eq| convergence_metric(&sim.trajectory, &eq, DEFAULT_TAIL_FRACTION));
            }
        }
        Err(CliError::Numerical(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// One header line, then one line per point in grid order.
pub fn rows_csv(grid: &SweepGrid, rows: &[SweepRow]) -> String {
    let mut out: Vec<String> = grid.axes.iter().map(|a| a.name.clone()).collect();
    out.extend(["verdict", "metric", "converged", "fault"].map(String::from));
    let mut text = out.join(",") + "\n";
    for row in rows {
        let mut cells: Vec<String> = row.values.iter().map(|&v| fmt_f64(v)).collect();
        cells.push(format!("{:?}", row.verdict));
        cells.push(row.metric.map(fmt_f64).unwrap_or_default());
        cells.push(row.converged().to_string());
        cells.push(row.fault.map(fault_cell).unwrap_or_default());
        text += &cells.join(",");
        text.push('\n');
    }
    text
}

fn fault_cell(f: angio_core::Fault) -> String {
    match f {
        angio_core::Fault::Positivity { t } => format!("positivity@{}", fmt_f64(t)),
        angio_core::Fault::Divergence { t } => format!("divergence@{}", fmt_f64(t)),
    }
}
