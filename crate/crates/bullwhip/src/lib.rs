//! Two-stage supply chain model (one retailer, one supplier) with iid demands,
//! iid stochastic lead times, an order-up-to policy and moving-average forecasts
//! of both demands and lead times.
//!
//! The crate evaluates the exact bullwhip-effect measure and its decomposition,
//! and cross-checks the closed forms by seeded Monte Carlo simulation. Closed-form
//! analytics are generic over the floating scalar; concrete aliases live at the
//! crate root. The `bullwhip` binary exposes the `analytic`, `table`, `sweep` and
//! `simulate` subcommands.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod forecasting;
pub mod simulator;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};

/// Double-precision model parameters, the default working type.
pub type ModelParams64 = analytics::ModelParams<f64>;
/// Single-precision model parameters.
pub type ModelParams32 = analytics::ModelParams<f32>;
/// Double-precision bullwhip decomposition.
pub type BullwhipDecomposition64 = analytics::BullwhipDecomposition<f64>;
/// Single-precision bullwhip decomposition.
pub type BullwhipDecomposition32 = analytics::BullwhipDecomposition<f32>;
