//! Small hand-built scenarios with known closed-form answers.

use alloc::vec;

use super::{Coupling, ScannerKind, ScannerModel, Scenario};
use crate::prob::Alphabet;

fn two_sites() -> Alphabet {
    Alphabet::with_labels("s", ["A", "B"]).expect("two distinct labels")
}

/// Uniform binary labels, uniform sites `A` and `B`, `bsc(eps_a)` at `A` and
/// `bsc(eps_b)` at `B`.
pub fn two_site_bsc(eps_a: f64, eps_b: f64) -> Scenario {
    Scenario::new(
        Alphabet::new("y", 2).expect("nonempty"),
        two_sites(),
        Coupling::Independent {
            label_prior: vec![0.5, 0.5],
            site_prior: vec![0.5, 0.5],
        },
        vec![
            ScannerModel::new(0, ScannerKind::Bsc { epsilon: eps_a }),
            ScannerModel::new(1, ScannerKind::Bsc { epsilon: eps_b }),
        ],
    )
    .expect("valid bsc scenario")
}

/// The same `bsc(eps)` at both sites.
pub fn identical_bsc(eps: f64) -> Scenario {
    two_site_bsc(eps, eps)
}

/// Three labels observed noiselessly; label `2` occurs only at site `B`.
///
/// Sites are uniform, `p(y | A) = (1/2, 1/2, 0)` and `p(y | B) = (1/3, 1/3, 1/3)`.
pub fn site_exclusive() -> Scenario {
    let third = 1.0 / 3.0;
    let identity = ScannerKind::Explicit {
        x_size: 3,
        rows: vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    };
    Scenario::new(
        Alphabet::new("y", 3).expect("nonempty"),
        two_sites(),
        Coupling::Joint {
            table: vec![0.25, 0.5 * third, 0.25, 0.5 * third, 0.0, 0.5 * third],
        },
        vec![ScannerModel::new(0, identity.clone()), ScannerModel::new(1, identity)],
    )
    .expect("valid site-exclusive scenario")
}
