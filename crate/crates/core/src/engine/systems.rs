//! Concrete [`DelaySystem`]s: the three models in original or log
//! coordinates, their log-deviation rewrite, the second-order Model 2
//! reduction, and two reference problems with known solutions.

use super::solver::{DelaySystem, PositivityMode};
use super::trajectory::Coords;
use crate::analysis::EquilibriumPoint;
use crate::delay::DelaySpec;
use crate::error::{param, Result};
use crate::model::{deviation_rhs, lienard_rhs, rhs_log, LienardCoefficients, ModelParams, State};
use crate::schedule::TreatmentSchedule;

/// Everything that defines one delayed model run apart from its initial data.
#[derive(Debug, Clone)]
pub struct ModelProblem {
    pub params: ModelParams,
    pub schedule: TreatmentSchedule,
    pub delay: DelaySpec,
}

impl ModelProblem {
    pub fn new(params: ModelParams, schedule: TreatmentSchedule, delay: DelaySpec) -> Self {
        Self {
            params,
            schedule,
            delay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.schedule.validate()?;
        self.delay.validate()
    }
}

/// A model integrated in original or logarithmic coordinates.
#[derive(Debug, Clone)]
pub struct ModelSystem<'a> {
    pub problem: &'a ModelProblem,
    pub mode: PositivityMode,
}

impl DelaySystem<2> for ModelSystem<'_> {
    fn delay(&self) -> &DelaySpec {
        &self.problem.delay
    }

    fn coords(&self) -> Coords {
        self.mode.coords()
    }

    fn requires_positive(&self) -> bool {
        true
    }

    fn check_time(&self, t: f64) -> Result<()> {
        self.problem.delay.check_at(t)?;
        let (p, c) = self.problem.schedule.rates(t);
        if !(p >= 0.0 && p.is_finite()) {
            return Err(param(
                "p",
                format!("p({t}) = {p} is negative or non-finite"),
            ));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(param(
                "c",
                format!("c({t}) = {c} is negative or non-finite"),
            ));
        }
        Ok(())
    }

    #[inline]
    fn rhs(&self, t: f64, y: &[f64; 2], delayed: &[f64; 2]) -> Result<[f64; 2]> {
        let ModelProblem {
            params, schedule, ..
        } = self.problem;
        match self.mode {
            PositivityMode::OriginalCoords => {
                let (dx, dk) = params.rhs(t, State::from(*y), delayed[0], schedule)?;
                Ok([dx, dk])
            }
            PositivityMode::LogCoords => {
                let (dlx, dlk) = rhs_log(t, (y[0], y[1]), delayed[0], params, schedule)?;
                Ok([dlx, dlk])
            }
        }
    }
}

/// A model rewritten in `(u, v) = (ln(x/x*), ln(K/K*))` about a fixed point.
#[derive(Debug, Clone)]
pub struct DeviationSystem<'a> {
    pub problem: &'a ModelProblem,
    pub equilibrium: EquilibriumPoint,
}

impl DelaySystem<2> for DeviationSystem<'_> {
    fn delay(&self) -> &DelaySpec {
        &self.problem.delay
    }

    #[inline]
    fn rhs(&self, t: f64, y: &[f64; 2], delayed: &[f64; 2]) -> Result<[f64; 2]> {
        let (du, dv) = deviation_rhs(
            &self.problem.params,
            &self.equilibrium,
            &self.problem.schedule,
            t,
            (y[0], y[1]),
            delayed[0],
        )?;
        Ok([du, dv])
    }
}

/// `(u, w)` with `u' = w`, `w' = -alpha w - a (e^{2 u(h(t)) / 3} - 1)`.
#[derive(Debug, Clone)]
pub struct LienardSystem {
    pub coeffs: LienardCoefficients,
    pub delay: DelaySpec,
}

impl DelaySystem<2> for LienardSystem {
    fn delay(&self) -> &DelaySpec {
        &self.delay
    }

    #[inline]
    fn rhs(&self, _t: f64, y: &[f64; 2], delayed: &[f64; 2]) -> Result<[f64; 2]> {
        let (du, dw) = lienard_rhs(y[1], delayed[0], &self.coeffs);
        Ok([du, dw])
    }
}

/// Reference problems with closed-form solutions.
pub mod problems {
    use super::*;

    /// `u' = -rate u`.
    #[derive(Debug, Clone)]
    pub struct ExponentialDecay {
        pub rate: f64,
        delay: DelaySpec,
    }

    impl ExponentialDecay {
        pub fn new(rate: f64) -> Self {
            Self {
                rate,
                delay: DelaySpec::None,
            }
        }
    }

    impl DelaySystem<1> for ExponentialDecay {
        fn delay(&self) -> &DelaySpec {
            &self.delay
        }

        fn rhs(&self, _t: f64, y: &[f64; 1], _delayed: &[f64; 1]) -> Result<[f64; 1]> {
            Ok([-self.rate * y[0]])
        }
    }

    /// `x'(t) = -coeff x(t - tau)`.
    #[derive(Debug, Clone)]
    pub struct LinearDelay {
        pub coeff: f64,
        delay: DelaySpec,
    }

    impl LinearDelay {
        pub fn new(coeff: f64, tau: f64) -> Result<Self> {
            Ok(Self {
                coeff,
                delay: DelaySpec::constant(tau)?,
            })
        }
    }

    impl DelaySystem<1> for LinearDelay {
        fn delay(&self) -> &DelaySpec {
            &self.delay
        }

        fn rhs(&self, _t: f64, _y: &[f64; 1], delayed: &[f64; 1]) -> Result<[f64; 1]> {
            Ok([-self.coeff * delayed[0]])
        }
    }
}
