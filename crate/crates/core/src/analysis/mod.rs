//! Equilibria, linearizations, M-matrix certificates and stability verdicts.

mod equilibrium;
mod linearize;
mod mmatrix;
mod stability;

pub use equilibrium::{
    equilibrium, equilibrium_model1, equilibrium_model2, equilibrium_model3, EquilibriumPoint,
};
pub use linearize::{linearize, linearize_model1, Linearization};
pub use mmatrix::{
    comparison_matrix, is_m_matrix, is_m_matrix_with_margin, ComparisonMatrix, MMatrixCheck,
    MMatrixFailure, Matrix, MAX_DIM,
};
pub use stability::{
    analyze, asymptotic_attractor_check, burton_check, model1_local_stability,
    model2_local_stability, model3_local_stability, Checker, StabilityReport, Theorem, Verdict,
};
