//! Scenario and sweep-grid configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use angio_core::analysis::equilibrium;
use angio_core::{
    DelaySpec, EquilibriumPoint, HistoryFunction, IntegratorOptions, ModelParams, State,
    TreatmentSchedule,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One model run: parameters, therapy, lag, initial data and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: ModelParams,
    #[serde(default = "TreatmentSchedule::untreated")]
    pub schedule: TreatmentSchedule,
    #[serde(default)]
    pub delay: DelayConfig,
    #[serde(default)]
    pub history: HistoryConfig,
    #[serde(default = "default_span")]
    pub t_span: [f64; 2],
    #[serde(default)]
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_span() -> [f64; 2] {
    [0.0, 500.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayConfig {
    #[default]
    None,
    Constant {
        tau: f64,
    },
    /// `t - h(t) = mean + amplitude sin(omega t)`.
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl DelayConfig {
    pub fn build(&self) -> angio_core::Result<DelaySpec> {
        match *self {
            DelayConfig::None => Ok(DelaySpec::None),
            DelayConfig::Constant { tau } => DelaySpec::constant(tau),
            DelayConfig::Sinusoidal {
                mean,
                amplitude,
                omega,
            } => DelaySpec::sinusoidal(mean, amplitude, omega),
        }
    }
}

/// State on `[t0 - tau_max, t0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HistoryConfig {
    Constant {
        x: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    /// `(x_scale x*, k_scale K*)` at the equilibrium of the limiting therapy.
    EquilibriumOffset {
        #[serde(default = "one_point_one")]
        x_scale: f64,
        #[serde(default = "one")]
        k_scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn one_point_one() -> f64 {
    1.1
}

impl Default for HistoryConfig {
    fn default() -> Self {
        HistoryConfig::EquilibriumOffset {
            x_scale: 1.1,
            k_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Every `stride`-th knot is written; the final knot always is.
    pub stride: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            stride: 1,
            trajectory: None,
            report: None,
        }
    }
}

/// A scenario with its derived objects, checked before any computation.
pub struct Prepared {
    pub delay: DelaySpec,
    pub equilibrium: Option<EquilibriumPoint>,
    pub history: HistoryFunction,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        parse_json(&read(path)?).map_err(|e| e.context(path))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Limits of the therapy rates, the point the equilibrium is taken at.
    pub fn limits(&self) -> Result<(f64, f64), CliError> {
        self.schedule
            .declared_limits()
            .ok_or_else(|| CliError::Input("schedule: rates must declare limits".into()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.prepare().map(|_| ())
    }

    /// Checks the parts the stability analysis reads.
    pub fn model_spec(&self) -> Result<DelaySpec, CliError> {
        self.params.validate().map_err(input("params"))?;
        self.schedule.validate().map_err(input("schedule"))?;
        self.delay.build().map_err(input("delay"))
    }

    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let delay = self.model_spec()?;
        self.integrator.validate().map_err(input("integrator"))?;
        let [t0, t1] = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(CliError::Input(format!(
                "t_span: need finite t0 < T, got [{t0}, {t1}]"
            )));
        }
        if self.output.stride == 0 {
            return Err(CliError::Input("output.stride: must be >= 1".into()));
        }
        let (p0, c0) = self.limits()?;
        let equilibrium = equilibrium(&self.params, p0, c0).ok();
        let start = match self.history {
            HistoryConfig::Constant { x, k } => State::new(x, k),
            HistoryConfig::EquilibriumOffset { x_scale, k_scale } => {
                let eq = equilibrium.ok_or_else(|| {
                    CliError::Input(
                        "history: equilibrium_offset needs a positive equilibrium".into(),
                    )
                })?;
                State::new(x_scale * eq.x_star, k_scale * eq.k_star)
            }
        };
        if !start.is_positive() {
            return Err(CliError::Input(format!(
                "history: state must be positive and finite, got x = {}, K = {}",
                start.x, start.k
            )));
        }
        Ok(Prepared {
            delay,
            equilibrium,
            history: HistoryFunction::constant_state(start),
        })
    }
}

fn input(field: &'static str) -> impl Fn(angio_core::Error) -> CliError {
    move |e| CliError::Input(format!("{field}: {e}"))
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub(crate) fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))
}
