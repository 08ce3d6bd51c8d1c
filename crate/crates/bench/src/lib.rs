//! Fixtures shared by the criterion benchmarks.

use angio_core::{
    analysis::equilibrium, DelaySpec, HistoryFunction, ModelParams, ModelProblem, State,
    TreatmentSchedule,
};

/// Model 1 reference problem started 10% above its equilibrium in `x`.
pub fn model1_problem(tau: Option<f64>) -> (ModelProblem, HistoryFunction) {
    let params = ModelParams::model1(1.0, 2.0, 0.1, 1.0);
    let eq = equilibrium(&params, 0.0, 0.1).expect("reference set has an equilibrium");
    let delay = match tau {
        Some(t) => DelaySpec::constant(t).expect("positive lag"),
        None => DelaySpec::None,
    };
    let problem = ModelProblem::new(params, TreatmentSchedule::constant(0.0, 0.1), delay);
    let history = HistoryFunction::constant_state(State::new(1.1 * eq.x_star, eq.k_star));
    (problem, history)
}
