//! Pareto set learning with evolution-strategy gradients.
//!
//! A preference-conditioned model maps each point of the simplex to a decision
//! vector; training minimizes the expected Tchebycheff value of the mapped
//! solutions using black-box gradient estimates. The crate also ships the
//! benchmark problems, a decomposition-based evolutionary baseline, quality
//! indicators and the run artifacts the command-line tool writes.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

mod error;
mod scalar;

pub mod artifact;
pub mod bundle;
pub mod compare;
pub mod domain;
pub mod es;
pub mod metrics;
pub mod model;
pub mod moead;
pub mod problems;
pub mod scalarize;
pub mod train;

pub use error::{Error, Result};
pub use scalar::{logistic, logit, softplus, Scalar};

pub type Preference = domain::PreferenceVector<f64>;
pub type Bounds = domain::BoxBounds<f64>;
pub type Decision = domain::DecisionVector<f64>;
pub type Objectives = domain::ObjectiveVector<f64>;
pub type Model = model::SetModel<f64>;
pub type Utopia = scalarize::UtopiaState<f64>;
