use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::model::{ModelKind, ModelParams};

/// Positive equilibrium of a model under constant therapy `(p0, c0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub x_star: f64,
    #[serde(rename = "K_star")]
    pub k_star: f64,
    /// `beta e^{-p0/alpha}`, the effective stimulation rate at equilibrium
    /// (Model 1 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

fn check_rates(p0: f64, c0: f64) -> Result<()> {
    if !(p0.is_finite() && p0 >= 0.0) {
        return Err(param("p0", format!("must be finite and >= 0, got {p0}")));
    }
    if !(c0.is_finite() && c0 >= 0.0) {
        return Err(param("c0", format!("must be finite and >= 0, got {c0}")));
    }
    Ok(())
}

fn expect_kind(params: &ModelParams, kind: ModelKind) -> Result<()> {
    params.validate()?;
    if params.model != kind {
        return Err(Error::Precondition(format!(
            "expected {kind:?} parameters, got {:?}",
            params.model
        )));
    }
    Ok(())
}

/// `x* = (excess / delta)^{3/2}` for a strictly positive `excess`.
fn mass_from_excess(excess: f64, delta: f64) -> Result<f64> {
    if excess > 0.0 {
        Ok((excess / delta).powf(1.5))
    } else {
        Err(Error::NoEquilibrium {
            marginal: excess == 0.0,
        })
    }
}

/// Model 1 equilibrium. Exists iff `beta > (gamma + c0) e^{p0/alpha}`.
pub fn equilibrium_model1(params: &ModelParams, p0: f64, c0: f64) -> Result<EquilibriumPoint> {
    expect_kind(params, ModelKind::Model1)?;
    check_rates(p0, c0)?;
    let threshold = (params.gamma + c0) * (p0 / params.alpha).exp();
    if params.beta <= threshold {
        return Err(Error::NoEquilibrium {
            marginal: params.beta == threshold,
        });
    }
    let eta = params.beta * (-p0 / params.alpha).exp();
    let x_star = mass_from_excess(eta - params.gamma - c0, params.delta)?;
    Ok(EquilibriumPoint {
        x_star,
        k_star: x_star * (p0 / params.alpha).exp(),
        eta: Some(eta),
    })
}

/// Model 2 equilibrium. Exists iff `beta > gamma + c0`.
pub fn equilibrium_model2(params: &ModelParams, p0: f64, c0: f64) -> Result<EquilibriumPoint> {
    expect_kind(params, ModelKind::Model2)?;
    check_rates(p0, c0)?;
    let x_star = mass_from_excess(params.beta - params.gamma - c0, params.delta)?;
    Ok(EquilibriumPoint {
        x_star,
        k_star: x_star * (p0 / params.alpha).exp(),
        eta: None,
    })
}

/// Stationary ratio `x*/K* = (1 - p0/alpha)^{1/m}` of the Richards model.
pub(crate) fn richards_ratio(params: &ModelParams, p0: f64) -> Result<f64> {
    let m = params.m()?;
    if p0 >= params.alpha {
        return Err(Error::NoEquilibrium {
            marginal: p0 == params.alpha,
        });
    }
    Ok((1.0 - p0 / params.alpha).powf(1.0 / m))
}

/// Model 3 equilibrium.
///
/// Setting the growth equation to zero gives `(x/K)^m = 1 - p0/alpha`, so
/// `x*/K* = rho = (1 - p0/alpha)^{1/m}`; the vasculature equation then gives
/// `x* = ((beta rho - gamma - c0)/delta)^{3/2}` and `K* = x*/rho`. Exists iff
/// `p0 < alpha` and `beta rho > gamma + c0`.
pub fn equilibrium_model3(params: &ModelParams, p0: f64, c0: f64) -> Result<EquilibriumPoint> {
    expect_kind(params, ModelKind::Model3)?;
    check_rates(p0, c0)?;
    let rho = richards_ratio(params, p0)?;
    let x_star = mass_from_excess(params.beta * rho - params.gamma - c0, params.delta)?;
    Ok(EquilibriumPoint {
        x_star,
        k_star: x_star / rho,
        eta: None,
    })
}

/// Equilibrium of whichever model `params` describes.
pub fn equilibrium(params: &ModelParams, p0: f64, c0: f64) -> Result<EquilibriumPoint> {
    match params.model {
        ModelKind::Model1 => equilibrium_model1(params, p0, c0),
        ModelKind::Model2 => equilibrium_model2(params, p0, c0),
        ModelKind::Model3 => equilibrium_model3(params, p0, c0),
    }
}
