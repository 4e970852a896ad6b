//! Exhaustive search over deterministic encoders `x -> z`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{evaluate_encoder, Encoder, EncoderProblem, InformationReport};
use crate::prob::{clamp_information, JointDistribution};
use crate::scenario::X_AXIS;
use crate::{Error, Result};

/// Largest number of maps `z_size^|X|` that will be enumerated.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Scores closer than this are treated as ties.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

/// One deterministic map and its scores.
#[derive(Debug, Clone, Copy)]
pub struct MapScore<'a> {
    pub map: &'a [usize],
    pub i_y_z: f64,
    pub i_z_s: f64,
}

impl MapScore<'_> {
    pub fn is_constant(&self) -> bool {
        self.map.windows(2).all(|w| w[0] == w[1])
    }
}

pub(crate) fn map_count(nx: usize, z_size: usize) -> Result<usize> {
    if z_size == 0 {
        return Err(Error::Usage("z_size must be at least 1".into()));
    }
    let mut count: u128 = 1;
    for _ in 0..nx {
        count = count.saturating_mul(z_size as u128);
        if count > ENUMERATION_CAP {
            return Err(Error::Capacity {
                what: "deterministic encoder enumeration",
                requested: (z_size as u128).saturating_pow(nx as u32),
                limit: ENUMERATION_CAP,
            });
        }
    }
    Ok(count as usize)
}

/// Advances `map` to the next map in lexicographic order (first entry most
/// significant). Returns `false` after the last map.
pub(crate) fn next_map(map: &mut [usize], z_size: usize) -> bool {
    for digit in map.iter_mut().rev() {
        *digit += 1;
        if *digit < z_size {
            return true;
        }
        *digit = 0;
    }
    false
}

/// Visits every deterministic map `x -> z` in lexicographic order.
pub fn enumerate_deterministic_maps(
    joint: &JointDistribution,
    z_size: usize,
    mut visit: impl FnMut(&MapScore<'_>),
) -> Result<usize> {
    let problem = EncoderProblem::new(joint)?;
    let count = map_count(problem.x_size(), z_size)?;
    let mut map = vec![0; problem.x_size()];
    loop {
        let (iyz, izs) = problem.map_information(&map, z_size);
        visit(&MapScore {
            map: &map,
            i_y_z: clamp_information(iyz, "I(y; z)")?,
            i_z_s: clamp_information(izs, "I(z; s)")?,
        });
        if !next_map(&mut map, z_size) {
            break;
        }
    }
    Ok(count)
}

/// Best deterministic encoder under an invariance budget.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicOptimum {
    pub map: Vec<usize>,
    pub encoder: Encoder,
    pub report: InformationReport,
    pub maps_scored: usize,
    pub feasible_maps: usize,
}

/// Maximizes `I(y; z)` over deterministic maps with `I(z; s) <= tolerance`.
///
/// Ties go to the lower `I(z; s)`, then to the earlier map.
pub fn enumerate_deterministic_optimum(
    joint: &JointDistribution,
    z_size: usize,
    invariance_tolerance: f64,
) -> Result<DeterministicOptimum> {
    let mut best: Option<(Vec<usize>, f64, f64)> = None;
    let mut feasible_maps = 0;
    let maps_scored = enumerate_deterministic_maps(joint, z_size, |score| {
        if score.i_z_s > invariance_tolerance {
            return;
        }
        feasible_maps += 1;
        let better = match &best {
            None => true,
            Some((_, iyz, izs)) => {
                score.i_y_z > iyz + TIE_TOLERANCE
                    || ((score.i_y_z - iyz).abs() <= TIE_TOLERANCE && score.i_z_s < izs - TIE_TOLERANCE)
            }
        };
        if better {
            best = Some((score.map.to_vec(), score.i_y_z, score.i_z_s));
        }
    })?;
    // The constant map has I(z; s) = 0, so something is always feasible.
    let (map, _, _) = best.ok_or_else(|| {
        Error::Usage(format!(
            "no deterministic map meets invariance tolerance {invariance_tolerance}"
        ))
    })?;
    let encoder = Encoder::deterministic(joint.axis(X_AXIS), z_size, &map)?;
    let report = evaluate_encoder(joint, &encoder)?;
    Ok(DeterministicOptimum {
        map,
        encoder,
        report,
        maps_scored,
        feasible_maps,
    })
}
