//! Stability verdicts for the constant- and converging-therapy models.
//!
//! Every check records the quantities it compared so a report can be audited
//! without re-running the analysis. Conditions are strict: a value sitting
//! exactly on a threshold is never certified.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::equilibrium::{equilibrium, equilibrium_model1, equilibrium_model2};
use super::linearize::{linearize, Linearization};
use super::mmatrix::{comparison_matrix, is_m_matrix_with_margin, Matrix};
use crate::delay::DelaySpec;
use crate::error::{Error, Result};
use crate::model::{ModelKind, ModelParams};
use crate::schedule::TreatmentSchedule;

/// Which stability result a report applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// Global attraction to zero for systems whose comparison matrix is an
    /// M-matrix.
    ComparisonMatrix,
    /// Local asymptotic stability of Model 1, for any bounded delay, via the
    /// comparison matrix of its linearization.
    Model1MMatrix,
    /// Burton's criterion for the undelayed Liénard reduction of Model 2.
    Burton,
    /// Exponential stability of the delayed Liénard reduction of Model 2.
    Model2DelayedLienard,
    /// Model 1 under therapy rates converging to `(p0, c0)`.
    Model1Asymptotic,
    /// Model 2 under therapy rates converging to `(p0, c0)`.
    Model2Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedStable,
    NotCertified,
    NoEquilibrium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub theorem: Theorem,
    pub verdict: Verdict,
    pub condition_values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl StabilityReport {
    fn new(theorem: Theorem) -> Self {
        Self {
            theorem,
            verdict: Verdict::NotCertified,
            condition_values: BTreeMap::new(),
            matrix: None,
            notes: Vec::new(),
        }
    }

    fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.condition_values.insert(name.to_owned(), value);
        self
    }

    fn no_equilibrium(mut self, marginal: bool) -> Self {
        self.verdict = Verdict::NoEquilibrium;
        if marginal {
            self.notes
                .push("marginal: the existence condition holds with equality".into());
        }
        self
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedStable
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.condition_values.get(name).copied()
    }
}

/// Runs the checks with a strictness margin: a condition `lhs > rhs` is
/// accepted only when `lhs > rhs + margin`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Checker {
    pub margin: f64,
}

impl Checker {
    pub fn with_margin(margin: f64) -> Self {
        Self { margin }
    }

    /// Comparison-matrix certificate for a bounded linear delay system.
    pub fn comparison(
        &self,
        diagonal_lower: &[f64],
        coupling_sup: &Matrix,
        delayed_sup: &Matrix,
    ) -> Result<StabilityReport> {
        let cm = comparison_matrix(diagonal_lower, coupling_sup, delayed_sup)?;
        let mut report = StabilityReport::new(Theorem::ComparisonMatrix);
        self.record_m_matrix(&mut report, &cm.matrix)?;
        Ok(report)
    }

    fn record_m_matrix(&self, report: &mut StabilityReport, b: &Matrix) -> Result<bool> {
        let check = is_m_matrix_with_margin(b, self.margin)?;
        for (k, d) in check.minors.iter().enumerate() {
            report.set(&format!("minor_{}", k + 1), *d);
        }
        report.set(
            "inverse_nonnegative",
            if check.inverse_nonnegative { 1.0 } else { 0.0 },
        );
        if check.disagreement {
            report
                .notes
                .push("internal: minors test and nonnegative-inverse test disagree".into());
        }
        report.matrix = Some(b.to_rows());
        report.verdict = if check.is_m_matrix {
            Verdict::CertifiedStable
        } else {
            Verdict::NotCertified
        };
        Ok(check.is_m_matrix)
    }

    /// Comparison matrix of a mass-stimulated linearization: diagonal bounds
    /// from the instantaneous diagonal, couplings from the instantaneous
    /// off-diagonals, delayed bounds from the delayed part.
    fn linearization_matrix(lin: &Linearization) -> Result<Matrix> {
        let a = [-lin.instantaneous[0][0], -lin.instantaneous[1][1]];
        let coupling = Matrix::from_rows(&[
            [0.0, lin.instantaneous[0][1].abs()],
            [lin.instantaneous[1][0].abs(), 0.0],
        ])?;
        let delayed = Matrix::from_rows(&lin.delayed.map(|r| r.map(f64::abs)))?;
        Ok(comparison_matrix(&a, &coupling, &delayed)?.matrix)
    }

    /// Model 1 under constant therapy: the comparison matrix
    /// `[[alpha, -alpha], [-(eta + 2 gamma + 2 c0)/3, eta]]` of the
    /// linearization must be an M-matrix. Its determinant is
    /// `(2 alpha / 3)(eta - gamma - c0)`, positive exactly when the
    /// equilibrium exists. The certificate holds for every bounded delay.
    pub fn model1_local_stability(
        &self,
        params: &ModelParams,
        p0: f64,
        c0: f64,
    ) -> Result<StabilityReport> {
        let mut report = StabilityReport::new(Theorem::Model1MMatrix);
        report.set("beta", params.beta).set(
            "beta_threshold",
            (params.gamma + c0) * (p0 / params.alpha).exp(),
        );
        let eq = match equilibrium_model1(params, p0, c0) {
            Ok(eq) => eq,
            Err(Error::NoEquilibrium { marginal }) => return Ok(report.no_equilibrium(marginal)),
            Err(e) => return Err(e),
        };
        let eta = eq.eta.expect("model1 equilibria carry eta");
        let lin = linearize(params, p0, c0)?;
        let b = Self::linearization_matrix(&lin)?;
        report
            .set("eta", eta)
            .set("x_star", eq.x_star)
            .set("K_star", eq.k_star)
            .set("determinant", b.det())
            .set(
                "determinant_closed_form",
                2.0 * params.alpha / 3.0 * (eta - params.gamma - c0),
            );
        self.record_m_matrix(&mut report, &b)?;
        report.set("delay_independent", 1.0);
        report
            .notes
            .push("certificate holds for every delay bound tau with t - h(t) <= tau".into());
        Ok(report)
    }

    /// Model 2 with delays bounded by `tau`: certified iff
    /// `0 < beta - gamma - c0 < 1.5 tau`, i.e. the linear reduction
    /// `u'' + alpha u' + (2/3) alpha (beta - gamma - c0) u(h(t)) = 0` has
    /// `|b| / a < tau`.
    pub fn model2_local_stability(
        &self,
        params: &ModelParams,
        p0: f64,
        c0: f64,
        tau: f64,
    ) -> Result<StabilityReport> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Precondition(format!(
                "delay bound tau must be > 0, got {tau}"
            )));
        }
        let excess = params.beta - params.gamma - c0;
        let mut report = StabilityReport::new(Theorem::Model2DelayedLienard);
        report
            .set("excess", excess)
            .set("bound", 1.5 * tau)
            .set("tau", tau)
            .set("lienard_a", params.alpha)
            .set("lienard_b", 2.0 / 3.0 * params.alpha * excess)
            .set("ratio_b_over_a", 2.0 / 3.0 * excess);
        match equilibrium_model2(params, p0, c0) {
            Ok(eq) => {
                report.set("x_star", eq.x_star).set("K_star", eq.k_star);
            }
            Err(Error::NoEquilibrium { marginal }) => return Ok(report.no_equilibrium(marginal)),
            Err(e) => return Err(e),
        }
        report.notes.push(
            "condition |b|/a < tau is applied as stated; the certified range of beta - gamma - c0 widens as tau grows"
                .into(),
        );
        report.verdict = if excess > self.margin && excess < 1.5 * tau - self.margin {
            Verdict::CertifiedStable
        } else {
            Verdict::NotCertified
        };
        Ok(report)
    }

    /// Undelayed Model 2 through `u'' + f(u) u' + g(u) = 0` with
    /// `f = alpha`, `g(u) = A (e^{2u/3} - 1)`, `A = alpha (beta - gamma - c0)`.
    /// Global asymptotic stability holds iff `f > 0`, `u g(u) > 0` for
    /// `u != 0` and `int_0^{+-inf} (f + |g|) = +-inf`; with constant `f` all
    /// three reduce to `A > 0`.
    pub fn burton_check(&self, params: &ModelParams, p0: f64, c0: f64) -> Result<StabilityReport> {
        params.validate()?;
        if params.model != ModelKind::Model2 {
            return Err(Error::Precondition("burton_check applies to model2".into()));
        }
        let excess = params.beta - params.gamma - c0;
        let a = params.alpha * excess;
        let mut report = StabilityReport::new(Theorem::Burton);
        report
            .set("f", params.alpha)
            .set("A", a)
            .set("excess", excess);
        if let Ok(eq) = equilibrium_model2(params, p0, c0) {
            report.set("x_star", eq.x_star).set("K_star", eq.k_star);
        }
        report.verdict = if a > self.margin && params.alpha > self.margin {
            Verdict::CertifiedStable
        } else {
            Verdict::NotCertified
        };
        Ok(report)
    }

    /// Model 3 under constant therapy, by the comparison matrix of its
    /// linearization (same construction as Model 1).
    pub fn model3_local_stability(
        &self,
        params: &ModelParams,
        p0: f64,
        c0: f64,
    ) -> Result<StabilityReport> {
        if params.model != ModelKind::Model3 {
            return Err(Error::Precondition(
                "model3_local_stability applies to model3".into(),
            ));
        }
        let mut report = StabilityReport::new(Theorem::ComparisonMatrix);
        let eq = match equilibrium(params, p0, c0) {
            Ok(eq) => eq,
            Err(Error::NoEquilibrium { marginal }) => return Ok(report.no_equilibrium(marginal)),
            Err(e) => return Err(e),
        };
        let lin = linearize(params, p0, c0)?;
        let b = Self::linearization_matrix(&lin)?;
        report
            .set("x_star", eq.x_star)
            .set("K_star", eq.k_star)
            .set("determinant", b.det());
        self.record_m_matrix(&mut report, &b)?;
        Ok(report)
    }

    /// Therapy converging to `(p0, c0)`: the verdict is that of the
    /// constant-therapy system at the limits, since a vanishing forcing term
    /// preserves attraction of an exponentially stable linear delay system.
    /// `tau = None` means an undelayed Model 2, checked with Burton's
    /// condition.
    pub fn asymptotic_attractor_check(
        &self,
        params: &ModelParams,
        schedule: &TreatmentSchedule,
        tau: Option<f64>,
    ) -> Result<StabilityReport> {
        let (p0, c0) = schedule.declared_limits().ok_or_else(|| {
            Error::Precondition("schedule must declare limits for both p(t) and c(t)".into())
        })?;
        let (theorem, base) = match (params.model, tau) {
            (ModelKind::Model1, _) => (
                Theorem::Model1Asymptotic,
                self.model1_local_stability(params, p0, c0)?,
            ),
            (ModelKind::Model2, Some(tau)) => (
                Theorem::Model2Asymptotic,
                self.model2_local_stability(params, p0, c0, tau)?,
            ),
            (ModelKind::Model2, None) => {
                let mut base = self.burton_check(params, p0, c0)?;
                if equilibrium_model2(params, p0, c0).is_err() {
                    base.verdict = Verdict::NoEquilibrium;
                }
                (Theorem::Model2Asymptotic, base)
            }
            (ModelKind::Model3, _) => {
                return Err(Error::Precondition(
                    "no converging-therapy criterion is available for model3".into(),
                ))
            }
        };
        let mut report = StabilityReport { theorem, ..base };
        report.set("limit_p0", p0).set("limit_c0", c0);
        report.notes.push(format!(
            "limit system verdict from {:?}",
            base_theorem(params, tau)
        ));
        Ok(report)
    }

    /// Picks the check that applies to a scenario.
    pub fn analyze(
        &self,
        params: &ModelParams,
        schedule: &TreatmentSchedule,
        delay: &DelaySpec,
    ) -> Result<StabilityReport> {
        params.validate()?;
        schedule.validate()?;
        delay.validate()?;
        let (p0, c0) = schedule.declared_limits().ok_or_else(|| {
            Error::Precondition("schedule must declare limits for both p(t) and c(t)".into())
        })?;
        let tau = delay.is_delayed().then(|| delay.bounds().1);
        match params.model {
            ModelKind::Model3 => self.model3_local_stability(params, p0, c0),
            _ if !schedule.is_constant() => self.asymptotic_attractor_check(params, schedule, tau),
            ModelKind::Model1 => self.model1_local_stability(params, p0, c0),
            ModelKind::Model2 => match tau {
                Some(tau) => self.model2_local_stability(params, p0, c0, tau),
                None => self.burton_check(params, p0, c0),
            },
        }
    }
}

fn base_theorem(params: &ModelParams, tau: Option<f64>) -> Theorem {
    match (params.model, tau) {
        (ModelKind::Model2, Some(_)) => Theorem::Model2DelayedLienard,
        (ModelKind::Model2, None) => Theorem::Burton,
        _ => Theorem::Model1MMatrix,
    }
}

pub fn model1_local_stability(params: &ModelParams, p0: f64, c0: f64) -> Result<StabilityReport> {
    Checker::default().model1_local_stability(params, p0, c0)
}

pub fn model2_local_stability(
    params: &ModelParams,
    p0: f64,
    c0: f64,
    tau: f64,
) -> Result<StabilityReport> {
    Checker::default().model2_local_stability(params, p0, c0, tau)
}

pub fn model3_local_stability(params: &ModelParams, p0: f64, c0: f64) -> Result<StabilityReport> {
    Checker::default().model3_local_stability(params, p0, c0)
}

pub fn burton_check(params: &ModelParams, p0: f64, c0: f64) -> Result<StabilityReport> {
    Checker::default().burton_check(params, p0, c0)
}

pub fn asymptotic_attractor_check(
    params: &ModelParams,
    schedule: &TreatmentSchedule,
    tau: Option<f64>,
) -> Result<StabilityReport> {
    Checker::default().asymptotic_attractor_check(params, schedule, tau)
}

pub fn analyze(
    params: &ModelParams,
    schedule: &TreatmentSchedule,
    delay: &DelaySpec,
) -> Result<StabilityReport> {
    Checker::default().analyze(params, schedule, delay)
}
