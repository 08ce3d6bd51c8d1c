//! Therapy schedules: the tumor-kill rate `p(t)` and the vasculature-kill rate
//! `c(t)`.
//!
//! Every rate is a total function of time. Rates that converge as `t -> inf`
//! expose their limit through [`Rate::limit`], which is what the
//! asymptotically-autonomous stability checks consume.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// A nonnegative, time-dependent rate (1/time).
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Rate {
    /// `value` for all t.
    Constant { value: f64 },
    /// `limit + amplitude * exp(-rate * t)`.
    ExpDecay {
        limit: f64,
        amplitude: f64,
        rate: f64,
    },
    /// `limit + amplitude / (1 + rate * t)`.
    Hyperbolic {
        limit: f64,
        amplitude: f64,
        rate: f64,
    },
    /// Drug concentration driven by `dc/dt = v(t) - decay * c`, `c(0) = initial`.
    Pharmacokinetic {
        dose: DoseRate,
        decay: f64,
        initial: f64,
    },
    /// Arbitrary user function with an optional declared limit.
    #[serde(skip)]
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        limit: Option<f64>,
    },
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Constant { value } => f.debug_struct("Constant").field("value", value).finish(),
            Rate::ExpDecay {
                limit,
                amplitude,
                rate,
            } => f
                .debug_struct("ExpDecay")
                .field("limit", limit)
                .field("amplitude", amplitude)
                .field("rate", rate)
                .finish(),
            Rate::Hyperbolic {
                limit,
                amplitude,
                rate,
            } => f
                .debug_struct("Hyperbolic")
                .field("limit", limit)
                .field("amplitude", amplitude)
                .field("rate", rate)
                .finish(),
            Rate::Pharmacokinetic {
                dose,
                decay,
                initial,
            } => f
                .debug_struct("Pharmacokinetic")
                .field("dose", dose)
                .field("decay", decay)
                .field("initial", initial)
                .finish(),
            Rate::Custom { limit, .. } => f
                .debug_struct("Custom")
                .field("limit", limit)
                .finish_non_exhaustive(),
        }
    }
}

impl PartialEq for Rate {
    fn eq(&self, other: &Self) -> bool {
        use Rate::*;
        match (self, other) {
            (Constant { value: a }, Constant { value: b }) => a == b,
            (
                ExpDecay {
                    limit: l1,
                    amplitude: a1,
                    rate: r1,
                },
                ExpDecay {
                    limit: l2,
                    amplitude: a2,
                    rate: r2,
                },
            )
            | (
                Hyperbolic {
                    limit: l1,
                    amplitude: a1,
                    rate: r1,
                },
                Hyperbolic {
                    limit: l2,
                    amplitude: a2,
                    rate: r2,
                },
            ) => l1 == l2 && a1 == a2 && r1 == r2,
            (
                Pharmacokinetic {
                    dose: d1,
                    decay: q1,
                    initial: i1,
                },
                Pharmacokinetic {
                    dose: d2,
                    decay: q2,
                    initial: i2,
                },
            ) => d1 == d2 && q1 == q2 && i1 == i2,
            (Custom { f: f1, limit: l1 }, Custom { f: f2, limit: l2 }) => {
                Arc::ptr_eq(f1, f2) && l1 == l2
            }
            _ => false,
        }
    }
}

/// Dose rate `v(t)` feeding a pharmacokinetic rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DoseRate {
    /// Constant infusion.
    Constant { value: f64 },
    /// `limit + amplitude * exp(-rate * t)`.
    ExpDecay {
        limit: f64,
        amplitude: f64,
        rate: f64,
    },
}

impl DoseRate {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            DoseRate::Constant { value } => value,
            DoseRate::ExpDecay {
                limit,
                amplitude,
                rate,
            } => limit + amplitude * (-rate * t).exp(),
        }
    }

    pub fn limit(&self) -> f64 {
        match *self {
            DoseRate::Constant { value } => value,
            DoseRate::ExpDecay { limit, .. } => limit,
        }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        match *self {
            DoseRate::Constant { value } => nonneg(name, value),
            DoseRate::ExpDecay {
                limit,
                amplitude,
                rate,
            } => decaying(name, limit, amplitude, rate),
        }
    }

    /// Concentration at `t` for `dc/dt = v(t) - q c`, `c(0) = c0`, in closed form.
    fn concentration(&self, q: f64, c0: f64, t: f64) -> f64 {
        let decay = (-q * t).exp();
        match *self {
            DoseRate::Constant { value } => value / q + (c0 - value / q) * decay,
            DoseRate::ExpDecay {
                limit,
                amplitude,
                rate,
            } => {
                let forced = if (q - rate).abs() <= 1e-12 * q.max(rate) {
                    amplitude * t * decay
                } else {
                    amplitude * ((-rate * t).exp() - decay) / (q - rate)
                };
                c0 * decay + limit / q * (1.0 - decay) + forced
            }
        }
    }
}

fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(param(name, format!("must be finite and >= 0, got {v}")))
    }
}

fn decaying(name: &'static str, limit: f64, amplitude: f64, rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(param(name, format!("decay rate must be > 0, got {rate}")));
    }
    if !amplitude.is_finite() {
        return Err(param(name, "amplitude must be finite"));
    }
    // values sweep monotonically from limit + amplitude to limit
    nonneg(name, limit)?;
    nonneg(name, limit + amplitude)
}

impl Rate {
    pub fn constant(value: f64) -> Self {
        Rate::Constant { value }
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, limit: Option<f64>) -> Self {
        Rate::Custom {
            f: Arc::new(f),
            limit,
        }
    }

    /// Value of the rate at time `t >= 0`.
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Rate::Constant { value } => *value,
            Rate::ExpDecay {
                limit,
                amplitude,
                rate,
            } => limit + amplitude * (-rate * t).exp(),
            Rate::Hyperbolic {
                limit,
                amplitude,
                rate,
            } => limit + amplitude / (1.0 + rate * t),
            Rate::Pharmacokinetic {
                dose,
                decay,
                initial,
            } => dose.concentration(*decay, *initial, t),
            Rate::Custom { f, .. } => f(t),
        }
    }

    /// Limit as `t -> inf`, when the variant guarantees one.
    pub fn limit(&self) -> Option<f64> {
        match self {
            Rate::Constant { value } => Some(*value),
            Rate::ExpDecay { limit, .. } | Rate::Hyperbolic { limit, .. } => Some(*limit),
            Rate::Pharmacokinetic { dose, decay, .. } => Some(dose.limit() / decay),
            Rate::Custom { limit, .. } => *limit,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Rate::Constant { .. })
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        match self {
            Rate::Constant { value } => nonneg(name, *value),
            Rate::ExpDecay {
                limit,
                amplitude,
                rate,
            }
            | Rate::Hyperbolic {
                limit,
                amplitude,
                rate,
            } => decaying(name, *limit, *amplitude, *rate),
            Rate::Pharmacokinetic {
                dose,
                decay,
                initial,
            } => {
                if !(decay.is_finite() && *decay > 0.0) {
                    return Err(param(name, format!("decay must be > 0, got {decay}")));
                }
                nonneg(name, *initial)?;
                dose.validate(name)
            }
            Rate::Custom { limit, .. } => match limit {
                Some(l) => nonneg(name, *l),
                None => Ok(()),
            },
        }
    }
}

/// Therapy applied to the tumor (`p`) and to the vasculature (`c`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreatmentSchedule {
    pub p: Rate,
    pub c: Rate,
}

impl TreatmentSchedule {
    pub fn new(p: Rate, c: Rate) -> Self {
        Self { p, c }
    }

    /// Constant-rate therapy `p(t) = p0`, `c(t) = c0`.
    pub fn constant(p0: f64, c0: f64) -> Self {
        Self::new(Rate::constant(p0), Rate::constant(c0))
    }

    /// No therapy.
    pub fn untreated() -> Self {
        Self::constant(0.0, 0.0)
    }

    /// `(p0, c0)` when both rates converge.
    pub fn declared_limits(&self) -> Option<(f64, f64)> {
        Some((self.p.limit()?, self.c.limit()?))
    }

    pub fn is_constant(&self) -> bool {
        self.p.is_constant() && self.c.is_constant()
    }

    pub fn validate(&self) -> Result<()> {
        self.p.validate("p")?;
        self.c.validate("c")
    }

    /// `(p(t), c(t))`.
    #[inline]
    pub fn rates(&self, t: f64) -> (f64, f64) {
        (self.p.at(t), self.c.at(t))
    }
}

// Gauss-Legendre 5-point nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Kernel weight below which the convolution tail is dropped (`exp(-50)`).
const MEMORY_CUTOFF: f64 = 50.0;

/// Solves the one-compartment drug equation `dc/dt = v(t) - q c(t)` with
/// `c(0) = c0` and returns `c(t)`.
///
/// Uses the integrating factor
/// `c(t) = c0 e^{-qt} + int_0^t e^{-q(t-s)} v(s) ds`, with the integral
/// evaluated by composite Gauss-Legendre quadrature. Dose history older than
/// `50 / q` contributes less than `e^{-50}` of its magnitude and is skipped.
pub fn pk_concentration(v: &dyn Fn(f64) -> f64, q: f64, c0: f64, t: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(param("q", format!("decay rate must be > 0, got {q}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!(
            "pk_concentration needs t >= 0, got {t}"
        )));
    }
    let start = (t - MEMORY_CUTOFF / q).max(0.0);
    let span = t - start;
    let mut integral = 0.0;
    if span > 0.0 {
        // panels no wider than a tenth of the kernel decay length
        let panels = ((span * q * 10.0).ceil() as usize).clamp(8, 100_000);
        let width = span / panels as f64;
        for i in 0..panels {
            let a = start + i as f64 * width;
            let mid = a + 0.5 * width;
            let half = 0.5 * width;
            let mut acc = 0.0;
            for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                let s = mid + half * node;
                acc += w * (-q * (t - s)).exp() * v(s);
            }
            integral += acc * half;
        }
    }
    Ok(c0 * (-q * t).exp() + integral)
}
