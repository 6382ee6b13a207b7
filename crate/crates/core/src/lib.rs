//! Bayesian minimum-mean-square-error estimation of the optomechanical
//! coupling strength from the reduced state of the optical field.

pub mod bound;
pub mod config;
pub mod error;
pub mod estimator;
pub mod field;
pub mod linalg;
pub mod oracle;
pub mod prior;
pub mod sweep;

pub use bound::{evaluate_bound, BoundResult};
pub use error::{Error, Result};
pub use estimator::{
    find_tstar, solve_at, solve_optimal, EstimatorSolution, TStarResult, TimeWindow,
};
pub use field::{
    build_density, FCoefficients, FieldDensityMatrix, MechInit, ModelConfig, OpticalAmplitudes,
};
pub use prior::{build_gammas, GaussianPrior, MomentOperators};
