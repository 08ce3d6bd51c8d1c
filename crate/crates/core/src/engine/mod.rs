//! Method-of-steps integration of delay systems.
//!
//! Each step is a classical four-stage Runge-Kutta step. Step sizes never
//! exceed the minimal lag, so every delayed argument of a step lands in the
//! history or in an already finalized cubic Hermite segment.

mod solver;
mod systems;
mod trajectory;

pub use solver::{solve, DelaySystem, Fault, IntegrateError, IntegratorOptions, PositivityMode};
pub use systems::{problems, DeviationSystem, LienardSystem, ModelProblem, ModelSystem};
pub use trajectory::{Coords, History, HistoryFunction, Trajectory};

use crate::analysis::EquilibriumPoint;
use crate::error::Error;

/// Integrates one of the models over `t_span` from `history`.
///
/// In [`PositivityMode::OriginalCoords`] a state leaving the open positive
/// cone halts the run with [`Fault::Positivity`]; the true solution stays
/// positive, so this signals a step that is too coarse.
pub fn integrate(
    problem: &ModelProblem,
    history: &HistoryFunction,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory<2>, IntegrateError<2>> {
    problem.validate()?;
    let (_, tau_max) = problem.delay.bounds();
    history.validate_positive(t_span.0, tau_max)?;
    let system = ModelSystem {
        problem,
        mode: opts.positivity_mode,
    };
    solve(&system, history.clone(), t_span, opts)
}

/// Sup over the last `tail_fraction` of `[t0, T]` of the max-norm deviation
/// from `target`, relative to `|target|` componentwise when `relative`.
///
/// The sup is taken over the tail start (via the interpolant) and every knot
/// after it.
pub fn tail_sup_deviation<const N: usize>(
    traj: &Trajectory<N>,
    target: &[f64; N],
    tail_fraction: f64,
    relative: bool,
) -> f64 {
    let frac = if tail_fraction > 0.0 {
        tail_fraction.min(1.0)
    } else {
        1.0
    };
    let (t0, t_end) = (traj.t0(), traj.t_end());
    let tail_start = t_end - frac * (t_end - t0);
    let deviation = |y: &[f64; N]| {
        y.iter()
            .zip(target)
            .map(|(a, b)| {
                let d = (a - b).abs();
                if relative {
                    d / b.abs()
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    };
    let start = traj
        .eval(tail_start.max(t0))
        .map(|y| deviation(&y))
        .unwrap_or(f64::INFINITY);
    let first = traj.times().partition_point(|&t| t <= tail_start);
    (first..traj.len())
        .map(|i| deviation(&traj.knot(i)))
        .fold(start, |acc, d| {
            if d.is_nan() {
                f64::INFINITY
            } else {
                acc.max(d)
            }
        })
}

/// Max-norm relative deviation from `eq` over the final `tail_fraction` of
/// the horizon.
pub fn convergence_metric(traj: &Trajectory<2>, eq: &EquilibriumPoint, tail_fraction: f64) -> f64 {
    tail_sup_deviation(traj, &[eq.x_star, eq.k_star], tail_fraction, true)
}

/// Default tail window for [`convergence_metric`].
pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;

impl<const N: usize> IntegrateError<N> {
    pub fn into_error(self) -> Option<Error> {
        match self {
            IntegrateError::Invalid(e) => Some(e),
            IntegrateError::Halted { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::equilibrium;
    use crate::delay::DelaySpec;
    use crate::model::{ModelParams, State};
    use crate::schedule::TreatmentSchedule;

    #[test]
    fn exponential_decay_endpoint() {
        let sys = problems::ExponentialDecay::new(1.0);
        let traj = solve(
            &sys,
            History::constant([1.0]),
            (0.0, 1.0),
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!((traj.eval(1.0).unwrap()[0] - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn linear_delay_first_interval_is_exact() {
        let sys = problems::LinearDelay::new(1.0, 1.0).unwrap();
        let traj = solve(
            &sys,
            History::constant([1.0]),
            (0.0, 1.0),
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(traj.eval(1.0).unwrap()[0].abs() < 1e-10);
        for (t, y) in traj.knots() {
            assert!((y[0] - (1.0 - t)).abs() < 1e-10);
        }
        // segment midpoints through the dense output
        for w in traj.times().windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!((traj.eval(mid).unwrap()[0] - (1.0 - mid)).abs() < 1e-10);
        }
        assert_eq!(traj.eval(-0.5).unwrap(), [1.0]);
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let params = ModelParams::model1(1.0, 2.0, 0.1, 1.0);
        let eq = equilibrium(&params, 0.0, 0.1).unwrap();
        let problem = ModelProblem::new(
            params,
            TreatmentSchedule::constant(0.0, 0.1),
            DelaySpec::constant(1.0).unwrap(),
        );
        let hist = History::constant_state(State::new(eq.x_star, eq.k_star));
        let traj = integrate(&problem, &hist, (0.0, 50.0), &IntegratorOptions::default()).unwrap();
        for (_, y) in traj.knots() {
            assert!((y[0] - eq.x_star).abs() < 1e-10 * eq.x_star);
            assert!((y[1] - eq.k_star).abs() < 1e-10 * eq.k_star);
        }
        assert!(convergence_metric(&traj, &eq, 0.1) < 1e-10);
    }

    #[test]
    fn invalid_history_rejected() {
        let params = ModelParams::model1(1.0, 2.0, 0.1, 1.0);
        let problem = ModelProblem::new(params, TreatmentSchedule::untreated(), DelaySpec::None);
        let hist = History::constant_state(State::new(-1.0, 1.0));
        let err =
            integrate(&problem, &hist, (0.0, 1.0), &IntegratorOptions::default()).unwrap_err();
        assert!(matches!(err, IntegrateError::Invalid(Error::Domain(_))));
        let hist = History::constant_state(State::new(1.0, 1.0));
        let err =
            integrate(&problem, &hist, (1.0, 1.0), &IntegratorOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            IntegrateError::Invalid(Error::Precondition(_))
        ));
    }

    #[test]
    fn coarse_steps_trip_positivity_fault() {
        // strong inhibition with a huge step overshoots K through zero
        let params = ModelParams::model2(1.0, 0.5, 0.0, 5.0);
        let problem = ModelProblem::new(
            params,
            TreatmentSchedule::untreated(),
            DelaySpec::constant(20.0).unwrap(),
        );
        let hist = History::constant_state(State::new(100.0, 100.0));
        let opts = IntegratorOptions {
            substeps_per_delay: 4,
            max_step: 100.0,
            ..Default::default()
        };
        match integrate(&problem, &hist, (0.0, 100.0), &opts) {
            Err(IntegrateError::Halted { fault, partial }) => {
                assert!(matches!(
                    fault,
                    Fault::Positivity { .. } | Fault::Divergence { .. }
                ));
                assert!(!partial.is_empty());
                assert!(partial.t_end() <= fault.time());
            }
            other => panic!("expected a fault, got {other:?}"),
        }
        // the log-coordinate mode cannot leave the cone
        let opts = IntegratorOptions {
            substeps_per_delay: 64,
            max_step: 0.1,
            positivity_mode: PositivityMode::LogCoords,
        };
        // K dips far below the f64 range but ln K stays finite
        let traj = integrate(&problem, &hist, (0.0, 100.0), &opts).unwrap();
        let (_, states, _) = traj.raw();
        assert!(states.iter().all(|y| y[0].is_finite() && y[1].is_finite()));
        assert_eq!(traj.t_end(), 100.0);
    }

    #[test]
    fn varying_lag_bounds_are_spot_checked() {
        let params = ModelParams::model1(1.0, 2.0, 0.1, 1.0);
        // declared [0.5, 1.0] but the actual lag is 2
        let delay = DelaySpec::varying(|t| t - 2.0, 0.5, 1.0).unwrap();
        let problem = ModelProblem::new(params, TreatmentSchedule::untreated(), delay);
        let hist = History::constant_state(State::new(1.0, 1.0));
        let err =
            integrate(&problem, &hist, (0.0, 5.0), &IntegratorOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            IntegrateError::Invalid(Error::DelayBounds { .. })
        ));
    }

    #[test]
    fn tail_metric_examples() {
        let eq = EquilibriumPoint {
            x_star: 2.0,
            k_star: 3.0,
            eta: None,
        };
        let knots = |f: &dyn Fn(f64) -> [f64; 2], df: &dyn Fn(f64) -> [f64; 2]| {
            let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.1).collect();
            let states = times.iter().map(|&t| f(t)).collect();
            let slopes = times.iter().map(|&t| df(t)).collect();
            Trajectory::from_knots(
                Coords::Linear,
                History::constant(f(0.0)),
                0.0,
                times,
                states,
                slopes,
            )
            .unwrap()
        };
        let flat = knots(&|_| [2.0, 3.0], &|_| [0.0, 0.0]);
        assert_eq!(convergence_metric(&flat, &eq, 0.1), 0.0);
        let doubled = knots(&|_| [4.0, 3.0], &|_| [0.0, 0.0]);
        assert_eq!(convergence_metric(&doubled, &eq, 0.1), 1.0);
        let decaying = knots(&|t| [2.0 * (1.0 + (-t).exp()), 3.0], &|t| {
            [-2.0 * (-t).exp(), 0.0]
        });
        let m = convergence_metric(&decaying, &eq, 0.1);
        assert!((m - (-90.0f64).exp()).abs() < 1e-15, "{m}");
        // sup over the tail picks the tail start
        let m = convergence_metric(&decaying, &eq, 0.95);
        assert!((m - (-5.0f64).exp()).abs() < 1e-12, "{m}");
    }
}
