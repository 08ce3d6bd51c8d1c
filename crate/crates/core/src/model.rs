//! Right-hand sides of the three delayed tumor/vasculature models.
//!
//! All models share the carrying-capacity mechanism
//!
//! ```text
//! dK/dt = S(x_h) - gamma K - delta x_h^{2/3} K - c(t) K,    x_h = x(h(t))
//! ```
//!
//! with stimulation `S(x_h) = beta x_h` (Model 1 and 3) or `S = beta K`
//! (Model 2). Tumor growth is Gompertzian, `alpha x ln(K/x)`, for Models 1
//! and 2 and Richards-logistic, `alpha x (1 - (x/K)^m)`, for Model 3.

use serde::{Deserialize, Serialize};

use crate::analysis::EquilibriumPoint;
use crate::error::{param, Error, Result};
use crate::schedule::TreatmentSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Gompertz growth, stimulation by the delayed tumor mass.
    Model1,
    /// Gompertz growth, stimulation proportional to the vasculature.
    Model2,
    /// Richards-logistic growth, stimulation by the delayed tumor mass.
    Model3,
}

/// Growth and vasculature constants for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub model: ModelKind,
    /// Tumor growth rate.
    pub alpha: f64,
    /// Stimulation coefficient.
    pub beta: f64,
    /// Vasculature loss rate.
    pub gamma: f64,
    /// Endogenous inhibition coefficient.
    pub delta: f64,
    /// Richards exponent, Model 3 only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub richards_m: Option<f64>,
}

impl ModelParams {
    pub fn model1(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            model: ModelKind::Model1,
            alpha,
            beta,
            gamma,
            delta,
            richards_m: None,
        }
    }

    pub fn model2(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            model: ModelKind::Model2,
            ..Self::model1(alpha, beta, gamma, delta)
        }
    }

    pub fn model3(alpha: f64, beta: f64, gamma: f64, delta: f64, m: f64) -> Self {
        Self {
            model: ModelKind::Model3,
            richards_m: Some(m),
            ..Self::model1(alpha, beta, gamma, delta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        positive("delta", self.delta)?;
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(param(
                "gamma",
                format!("must be finite and >= 0, got {}", self.gamma),
            ));
        }
        match (self.model, self.richards_m) {
            (ModelKind::Model3, Some(m)) => {
                positive("richards_m", m)?;
                if m == 1.0 {
                    return Err(param(
                        "richards_m",
                        "m = 1 is the symmetric logistic; need m != 1",
                    ));
                }
                Ok(())
            }
            (ModelKind::Model3, None) => Err(param("richards_m", "required for model3")),
            (_, Some(_)) => Err(param("richards_m", "only allowed for model3")),
            (_, None) => Ok(()),
        }
    }

    /// Richards exponent; errors unless this is a Model 3 parameter set.
    pub fn m(&self) -> Result<f64> {
        self.richards_m
            .ok_or_else(|| param("richards_m", "required for model3"))
    }

    /// Dispatches to the right-hand side of this model.
    pub fn rhs(
        &self,
        t: f64,
        current: State,
        delayed_x: f64,
        sched: &TreatmentSchedule,
    ) -> Result<(f64, f64)> {
        match self.model {
            ModelKind::Model1 => rhs_model1(t, current, delayed_x, self, sched),
            ModelKind::Model2 => rhs_model2(t, current, delayed_x, self, sched),
            ModelKind::Model3 => rhs_model3(t, current, delayed_x, self, sched),
        }
    }
}

/// Tumor mass `x` and carrying capacity `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl State {
    pub const fn new(x: f64, k: f64) -> Self {
        Self { x, k }
    }

    pub fn is_positive(&self) -> bool {
        self.x > 0.0 && self.k > 0.0 && self.x.is_finite() && self.k.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.k]
    }
}

impl From<[f64; 2]> for State {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl From<State> for [f64; 2] {
    fn from(s: State) -> Self {
        s.to_array()
    }
}

/// `x^{2/3}`, continuously extended by 0 at `x = 0`.
#[inline]
pub fn two_thirds_power(x: f64) -> f64 {
    let c = x.cbrt();
    c * c
}

fn check_domain(current: State, delayed_x: f64) -> Result<()> {
    if !current.is_positive() {
        return Err(Error::Domain(format!(
            "state must be strictly positive, got x = {}, K = {}",
            current.x, current.k
        )));
    }
    if !(delayed_x.is_finite() && delayed_x >= 0.0) {
        return Err(Error::Domain(format!(
            "delayed tumor mass must be >= 0, got {delayed_x}"
        )));
    }
    Ok(())
}

/// Shared vasculature balance for Models 1 and 3.
#[inline]
fn mass_stimulated_vasculature(k: f64, delayed_x: f64, p: &ModelParams, c: f64) -> f64 {
    p.beta * delayed_x - p.gamma * k - p.delta * two_thirds_power(delayed_x) * k - c * k
}

/// Model 1: Gompertz tumor growth with delayed mass-driven stimulation.
pub fn rhs_model1(
    t: f64,
    current: State,
    delayed_x: f64,
    params: &ModelParams,
    sched: &TreatmentSchedule,
) -> Result<(f64, f64)> {
    check_domain(current, delayed_x)?;
    let (p, c) = sched.rates(t);
    let State { x, k } = current;
    let dx = params.alpha * x * (k / x).ln() - p * x;
    let dk = mass_stimulated_vasculature(k, delayed_x, params, c);
    Ok((dx, dk))
}

/// Model 2: Gompertz tumor growth, vasculature stimulated in proportion to itself.
pub fn rhs_model2(
    t: f64,
    current: State,
    delayed_x: f64,
    params: &ModelParams,
    sched: &TreatmentSchedule,
) -> Result<(f64, f64)> {
    check_domain(current, delayed_x)?;
    let (p, c) = sched.rates(t);
    let State { x, k } = current;
    let dx = params.alpha * x * (k / x).ln() - p * x;
    let dk =
        (params.beta - params.gamma) * k - params.delta * two_thirds_power(delayed_x) * k - c * k;
    Ok((dx, dk))
}

/// Model 3: Richards-logistic tumor growth with the Model 1 vasculature.
pub fn rhs_model3(
    t: f64,
    current: State,
    delayed_x: f64,
    params: &ModelParams,
    sched: &TreatmentSchedule,
) -> Result<(f64, f64)> {
    check_domain(current, delayed_x)?;
    let m = params.m()?;
    let (p, c) = sched.rates(t);
    let State { x, k } = current;
    let dx = params.alpha * x * (1.0 - (x / k).powf(m)) - p * x;
    let dk = mass_stimulated_vasculature(k, delayed_x, params, c);
    Ok((dx, dk))
}

/// Right-hand side of `(ln x, ln K)`, evaluated without leaving log space
/// so that states far below the `f64` range stay representable.
pub fn rhs_log(
    t: f64,
    log_state: (f64, f64),
    delayed_x: f64,
    params: &ModelParams,
    sched: &TreatmentSchedule,
) -> Result<(f64, f64)> {
    let (lx, lk) = log_state;
    if !(lx.is_finite() && lk.is_finite()) {
        return Err(Error::Domain(format!(
            "log state must be finite, got ({lx}, {lk})"
        )));
    }
    if !(delayed_x.is_finite() && delayed_x >= 0.0) {
        return Err(Error::Domain(format!(
            "delayed tumor mass must be >= 0, got {delayed_x}"
        )));
    }
    let (p, c) = sched.rates(t);
    let dlx = match params.model {
        ModelKind::Model1 | ModelKind::Model2 => params.alpha * (lk - lx) - p,
        ModelKind::Model3 => params.alpha * (1.0 - (params.m()? * (lx - lk)).exp()) - p,
    };
    let inhibition = params.delta * two_thirds_power(delayed_x);
    let dlk = match params.model {
        ModelKind::Model2 => params.beta - params.gamma - inhibition - c,
        ModelKind::Model1 | ModelKind::Model3 => {
            params.beta * delayed_x * (-lk).exp() - params.gamma - inhibition - c
        }
    };
    Ok((dlx, dlk))
}

/// Log-deviation coordinates `(u, v) = (ln(x/x*), ln(K/K*))`.
pub fn to_exponential_coords(s: State, eq: &EquilibriumPoint) -> Result<(f64, f64)> {
    if !s.is_positive() {
        return Err(Error::Domain(format!(
            "state must be strictly positive, got ({}, {})",
            s.x, s.k
        )));
    }
    if !(eq.x_star > 0.0 && eq.k_star > 0.0) {
        return Err(Error::Domain(
            "equilibrium must be strictly positive".into(),
        ));
    }
    Ok(((s.x / eq.x_star).ln(), (s.k / eq.k_star).ln()))
}

pub fn from_exponential_coords(uv: (f64, f64), eq: &EquilibriumPoint) -> State {
    State::new(eq.x_star * uv.0.exp(), eq.k_star * uv.1.exp())
}

/// Right-hand side of a model rewritten in log-deviation coordinates about
/// `eq`. `u_delayed` is `u(h(t))`.
///
/// The rewrite is exact (no linearization), so it vanishes at the origin
/// exactly when `eq` is an equilibrium for the rates at time `t`.
pub fn deviation_rhs(
    params: &ModelParams,
    eq: &EquilibriumPoint,
    sched: &TreatmentSchedule,
    t: f64,
    uv: (f64, f64),
    u_delayed: f64,
) -> Result<(f64, f64)> {
    let (u, v) = uv;
    let (p, c) = sched.rates(t);
    let ratio = eq.x_star / eq.k_star;
    let inhibition = params.delta * two_thirds_power(eq.x_star) * (2.0 * u_delayed / 3.0).exp();
    let du = match params.model {
        ModelKind::Model1 | ModelKind::Model2 => {
            params.alpha * (v - u) - params.alpha * ratio.ln() - p
        }
        ModelKind::Model3 => {
            let m = params.m()?;
            params.alpha * (1.0 - ratio.powf(m) * (m * (u - v)).exp()) - p
        }
    };
    let dv = match params.model {
        ModelKind::Model2 => params.beta - params.gamma - inhibition - c,
        ModelKind::Model1 | ModelKind::Model3 => {
            params.beta * ratio * (u_delayed - v).exp() - params.gamma - inhibition - c
        }
    };
    Ok((du, dv))
}

/// Coefficients of the scalar second-order reduction of Model 2,
/// `u'' + alpha u' + a (e^{2 u_h / 3} - 1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LienardCoefficients {
    pub alpha: f64,
    /// `alpha (beta - gamma - c0)`.
    pub a: f64,
}

impl LienardCoefficients {
    pub fn from_model2(params: &ModelParams, c0: f64) -> Result<Self> {
        params.validate()?;
        if params.model != ModelKind::Model2 {
            return Err(Error::Precondition(
                "the second-order reduction applies to model2 only".into(),
            ));
        }
        Ok(Self {
            alpha: params.alpha,
            a: params.alpha * (params.beta - params.gamma - c0),
        })
    }
}

/// `(du/dt, dw/dt) = (w, -alpha w - a (e^{2 u_h / 3} - 1))` with `w = du/dt`.
#[inline]
pub fn lienard_rhs(w: f64, u_delayed: f64, coeffs: &LienardCoefficients) -> (f64, f64) {
    (
        w,
        -coeffs.alpha * w - coeffs.a * ((2.0 * u_delayed / 3.0).exp() - 1.0),
    )
}
