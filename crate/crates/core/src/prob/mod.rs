//! Exact probability and information-measure engine over finite alphabets.

mod alphabet;
mod channel;
mod joint;
mod measures;

pub use alphabet::Alphabet;
pub use channel::Channel;
pub(crate) use joint::checked_cells;
pub use joint::JointDistribution;
pub use measures::{
    binary_entropy, conditional_mutual_information, entropy, entropy_of, joint_entropy, mutual_information,
    push_through_channel, ConditionalMutualInformation, PushMode,
};

pub(crate) use measures::{clamp_information, mutual_information_table};

/// Largest deviation of a raw input sum from 1 that is treated as round-off.
pub const RAW_SUM_TOLERANCE: f64 = 1e-6;

/// Information values down to this (negative) level are clamped to zero.
pub const NEGATIVE_INFORMATION_TOLERANCE: f64 = 1e-10;

/// Cap on the number of cells in any dense table.
pub const MAX_DENSE_ENTRIES: usize = 10_000_000;
