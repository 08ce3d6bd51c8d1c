//! Random parameter sets shared by the integration suites.
#![allow(dead_code)]

use angio_core::analysis::equilibrium;
use angio_core::{EquilibriumPoint, ModelKind, ModelParams};
use rand::Rng;

/// One parameter set with constant therapy `(p0, c0)` and its equilibrium.
#[derive(Debug, Clone)]
pub struct Draw {
    pub params: ModelParams,
    pub p0: f64,
    pub c0: f64,
    pub eq: EquilibriumPoint,
    /// Margin by which the existence threshold is exceeded.
    pub excess: f64,
}

/// Moderate regime: rates of order one, existence thresholds exceeded by
/// `excess` in `[0.2, 2]`.
pub fn draw(rng: &mut impl Rng, kind: ModelKind) -> Draw {
    let excess = rng.gen_range(0.2..2.0);
    draw_with_excess(rng, kind, excess)
}

/// Draws everything but the threshold excess, which is given.
///
/// - Model 1: `beta e^{-p0/alpha} - gamma - c0 = excess`
/// - Model 2: `beta - gamma - c0 = excess`
/// - Model 3: `beta (1 - p0/alpha)^{1/m} - gamma - c0 = excess`
pub fn draw_with_excess(rng: &mut impl Rng, kind: ModelKind, excess: f64) -> Draw {
    let alpha = rng.gen_range(0.5..3.0);
    let gamma = rng.gen_range(0.05..0.5);
    let delta = rng.gen_range(0.5..2.0);
    let c0 = rng.gen_range(0.0..0.5);
    let p0 = rng.gen_range(0.0..0.5 * alpha);
    let m = rng.gen_range(0.5..3.0);
    let floor = gamma + c0 + excess;
    let params = match kind {
        ModelKind::Model1 => ModelParams::model1(alpha, floor * (p0 / alpha).exp(), gamma, delta),
        ModelKind::Model2 => ModelParams::model2(alpha, floor, gamma, delta),
        ModelKind::Model3 => ModelParams::model3(
            alpha,
            floor / (1.0 - p0 / alpha).powf(1.0 / m),
            gamma,
            delta,
            m,
        ),
    };
    let eq = equilibrium(&params, p0, c0).expect("drawn above the existence threshold");
    Draw {
        params,
        p0,
        c0,
        eq,
        excess,
    }
}

pub const KINDS: [ModelKind; 3] = [ModelKind::Model1, ModelKind::Model2, ModelKind::Model3];

/// Cofactor-expansion determinant.
pub fn det_cofactor(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * det_cofactor(&minor(m, 0, j))
        })
        .sum()
}

pub fn minor(m: &[Vec<f64>], row: usize, col: usize) -> Vec<Vec<f64>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|&(j, _)| j != col)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Nonnegative inverse through the adjugate.
pub fn inverse_nonnegative(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let det = det_cofactor(m);
    if det == 0.0 {
        return false;
    }
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .powi(n as i32 - 1);
    (0..n).all(|i| {
        (0..n).all(|j| {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            // inverse[i][j] = cofactor[j][i] / det
            let cof = sign
                * if n == 1 {
                    1.0
                } else {
                    det_cofactor(&minor(m, j, i))
                };
            cof / det >= -1e-12 * scale / det.abs()
        })
    })
}
