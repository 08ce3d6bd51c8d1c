use serde::{Deserialize, Serialize};

use super::equilibrium::{equilibrium, richards_ratio};
use crate::error::Result;
use crate::model::{ModelKind, ModelParams};

/// Jacobian at the origin of a model written in log-deviation coordinates,
/// split into the part acting on `(u(t), v(t))` and the part acting on the
/// delayed `(u(h(t)), v(h(t)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub instantaneous: [[f64; 2]; 2],
    pub delayed: [[f64; 2]; 2],
}

impl Linearization {
    /// Sum of both parts: the Jacobian of the undelayed system.
    pub fn combined(&self) -> [[f64; 2]; 2] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| self.instantaneous[i][j] + self.delayed[i][j])
        })
    }

    /// Whether entry `(i, j)` multiplies a delayed argument.
    pub fn is_delayed(&self, i: usize, j: usize) -> bool {
        self.delayed[i][j] != 0.0
    }
}

/// Linearization of Model 1 about its `(p0, c0)` equilibrium:
///
/// ```text
/// u' = -alpha u + alpha v
/// v' = (eta + 2 gamma + 2 c0)/3 * u(h(t)) - eta v
/// ```
pub fn linearize_model1(params: &ModelParams, p0: f64, c0: f64) -> Result<Linearization> {
    let eq = super::equilibrium::equilibrium_model1(params, p0, c0)?;
    let eta = eq.eta.expect("model1 equilibria carry eta");
    Ok(mass_stimulated(params.alpha, eta, params.gamma, c0))
}

/// Linearization of whichever model `params` describes.
pub fn linearize(params: &ModelParams, p0: f64, c0: f64) -> Result<Linearization> {
    match params.model {
        ModelKind::Model1 => linearize_model1(params, p0, c0),
        ModelKind::Model2 => {
            equilibrium(params, p0, c0)?;
            let excess = params.beta - params.gamma - c0;
            Ok(Linearization {
                instantaneous: [[-params.alpha, params.alpha], [0.0, 0.0]],
                delayed: [[0.0, 0.0], [-2.0 * excess / 3.0, 0.0]],
            })
        }
        ModelKind::Model3 => {
            equilibrium(params, p0, c0)?;
            let m = params.m()?;
            let rho = richards_ratio(params, p0)?;
            let growth = m * (params.alpha - p0);
            let mut lin = mass_stimulated(growth, params.beta * rho, params.gamma, c0);
            lin.instantaneous[0] = [-growth, growth];
            Ok(lin)
        }
    }
}

/// Shared shape for models whose vasculature is stimulated by the delayed
/// tumor mass; `eta` is `beta x*/K*`.
fn mass_stimulated(growth: f64, eta: f64, gamma: f64, c0: f64) -> Linearization {
    Linearization {
        instantaneous: [[-growth, growth], [0.0, -eta]],
        delayed: [[0.0, 0.0], [(eta + 2.0 * gamma + 2.0 * c0) / 3.0, 0.0]],
    }
}
