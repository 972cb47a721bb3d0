//! Capacitated k-median with outliers.
//!
//! The pipeline: build a ring-sampled coreset of the clients, enumerate
//! guesses for how the outlier weight sits on the coreset, solve each
//! residual capacitated k-median instance with a pluggable solver, and
//! score every candidate facility set on the original clients with an
//! exact min-cost-flow-with-outliers assignment.

#![allow(clippy::needless_range_loop)]

pub mod coreset;
pub mod error;
pub mod fair;
pub mod flow;
pub mod io;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    evaluate_cost, validate_instance, Assignment, Instance, MetricSpace, Solution, Violation,
    WeightedClientSet,
};
