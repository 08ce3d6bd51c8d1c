//! Lag functions `h(t)` with certified bounds `tau_min <= t - h(t) <= tau_max`.

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};

/// How the delayed argument `h(t)` is formed.
#[derive(Clone)]
pub enum DelaySpec {
    /// `h(t) = t`: the system is an ordinary differential equation.
    None,
    /// `h(t) = t - tau`.
    Constant(f64),
    /// Arbitrary lag point with declared bounds on `t - h(t)`.
    Varying {
        lag_point: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        tau_min: f64,
        tau_max: f64,
    },
}

impl fmt::Debug for DelaySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelaySpec::None => f.write_str("None"),
            DelaySpec::Constant(tau) => f.debug_tuple("Constant").field(tau).finish(),
            DelaySpec::Varying {
                tau_min, tau_max, ..
            } => f
                .debug_struct("Varying")
                .field("tau_min", tau_min)
                .field("tau_max", tau_max)
                .finish_non_exhaustive(),
        }
    }
}

impl DelaySpec {
    pub fn constant(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(param("tau", format!("constant lag must be > 0, got {tau}")));
        }
        Ok(DelaySpec::Constant(tau))
    }

    /// A bounded time-varying lag. Vanishing lower bounds are rejected: the
    /// method of steps needs `t - h(t) >= tau_min > 0`.
    pub fn varying(
        lag_point: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tau_min: f64,
        tau_max: f64,
    ) -> Result<Self> {
        if !(tau_min.is_finite() && tau_min > 0.0) {
            return Err(param(
                "tau_min",
                format!("lower lag bound must be > 0, got {tau_min}"),
            ));
        }
        if !(tau_max.is_finite() && tau_max >= tau_min) {
            return Err(param(
                "tau_max",
                format!("upper lag bound must be >= tau_min = {tau_min}, got {tau_max}"),
            ));
        }
        Ok(DelaySpec::Varying {
            lag_point: Arc::new(lag_point),
            tau_min,
            tau_max,
        })
    }

    /// `t - h(t) = mean + amplitude * sin(omega * t)`, bounded by `mean -+ |amplitude|`.
    pub fn sinusoidal(mean: f64, amplitude: f64, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(param("omega", "must be finite"));
        }
        let amp = amplitude.abs();
        Self::varying(
            move |t| t - (mean + amplitude * (omega * t).sin()),
            mean - amp,
            mean + amp,
        )
    }

    /// `h(t)`, or `None` for the undelayed system.
    #[inline]
    pub fn lag_point(&self, t: f64) -> Option<f64> {
        match self {
            DelaySpec::None => None,
            DelaySpec::Constant(tau) => Some(t - tau),
            DelaySpec::Varying { lag_point, .. } => Some(lag_point(t)),
        }
    }

    /// `(tau_min, tau_max)`; `(0, 0)` for the undelayed system.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            DelaySpec::None => (0.0, 0.0),
            DelaySpec::Constant(tau) => (*tau, *tau),
            DelaySpec::Varying {
                tau_min, tau_max, ..
            } => (*tau_min, *tau_max),
        }
    }

    pub fn is_delayed(&self) -> bool {
        !matches!(self, DelaySpec::None)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DelaySpec::None => Ok(()),
            DelaySpec::Constant(tau) => Self::constant(*tau).map(|_| ()),
            DelaySpec::Varying {
                tau_min, tau_max, ..
            } => {
                if *tau_min > 0.0 && tau_max >= tau_min {
                    Ok(())
                } else {
                    Err(param("tau_min", "need 0 < tau_min <= tau_max"))
                }
            }
        }
    }

    /// Spot check of the declared bounds at time `t`.
    pub(crate) fn check_at(&self, t: f64) -> Result<()> {
        if let DelaySpec::Varying {
            lag_point,
            tau_min,
            tau_max,
        } = self
        {
            let lag = t - lag_point(t);
            let slack = 1e-12 * tau_max.max(1.0);
            if !(lag >= tau_min - slack && lag <= tau_max + slack) {
                return Err(Error::DelayBounds {
                    t,
                    lag,
                    tau_min: *tau_min,
                    tau_max: *tau_max,
                });
            }
        }
        Ok(())
    }
}
