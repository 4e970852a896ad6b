//! Multi-site scanner worlds `p(y, s) p(x | y, s)`.
//!
//! A [`Scenario`] is declarative; [`build_joint`] materializes it as a
//! joint over the axes `(Y, S, X)` in that order (see [`Y_AXIS`],
//! [`S_AXIS`], [`X_AXIS`]).

mod generate;
mod model;
pub mod presets;
mod profile;

pub use generate::{random_scenario, random_scenario_with, RandomScenarioConfig, ScannerFamily, ScenarioSizes};
pub use model::{build_joint, Coupling, ScannerKind, ScannerModel, Scenario};
pub use profile::{per_site_information, site_exclusive_labels, LabelSupport, SiteInformationProfile};

/// Label axis of a built joint.
pub const Y_AXIS: usize = 0;
/// Site axis of a built joint.
pub const S_AXIS: usize = 1;
/// Observation axis of a built joint.
pub const X_AXIS: usize = 2;
