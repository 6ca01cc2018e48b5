//! Microwave–optical quantum resources in chain-coupled hybrid bosonic
//! systems: Gaussian covariance dynamics, entanglement, steering and
//! monogamy for effective and full multipartite models.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod closed_form;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod sweep;
pub mod systems;
pub mod verify;

pub use chain::{ChainParams, EffectiveModel, RegimeLabel};
pub use closed_form::{Direction, SteeringRegion};
pub use dynamics::{DriftDiffusion, Integrator, StepSize, Trajectory};
pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, ModePartition, ResourceReport};
