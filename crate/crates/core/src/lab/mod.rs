//! Invariant encoders: evaluation, optimization and audits.
//!
//! Encoders act on the observation axis of a `(Y, S, X)` joint built by
//! [`crate::scenario::build_joint`]. Appending the encoder output gives a
//! `(Y, S, X, Z)` joint in which `z` depends on `(y, s)` only through `x`.

mod audit;
mod encoder;
mod enumerate;
mod frontier;
mod objective;
mod optimize;
mod report;
mod search;

pub use audit::{check_prop1, check_prop2, Prop1Report, Prop1Tolerances, Prop2Report, Verdict};
pub use encoder::{bayes_predictor, Encoder, Predictor};
pub use enumerate::{
    enumerate_deterministic_maps, enumerate_deterministic_optimum, DeterministicOptimum, MapScore, ENUMERATION_CAP,
};
pub use frontier::{default_lambda_grid, lambda_grid, pareto_filter, sweep_frontier, Frontier};
pub use objective::EncoderProblem;
pub use optimize::{lagrangian_optimize, project_to_simplex, ObjectiveMode, OptimizeOptions, StepRule, TradeoffPoint};
pub use report::{evaluate_encoder, prediction_rates, InformationReport, SiteRates};
pub use search::{counterexample_search, search_instance, CatalogEntry, SearchCatalog, SearchConfig};

/// Encoder output axis of a `(Y, S, X, Z)` joint.
pub const Z_AXIS: usize = 3;
