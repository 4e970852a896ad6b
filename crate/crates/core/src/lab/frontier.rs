use alloc::format;
use alloc::vec::Vec;

use super::enumerate::TIE_TOLERANCE;
use super::{lagrangian_optimize, ObjectiveMode, OptimizeOptions, TradeoffPoint};
use crate::prob::JointDistribution;
use crate::{Error, Result};

/// A swept trade-off curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub mode: ObjectiveMode,
    /// One point per grid value, in grid order.
    pub points: Vec<TradeoffPoint>,
    /// Indices into `points` of the non-dominated subset, ordered from the
    /// least invariant (largest `i_z_s`) to the most invariant.
    pub pareto: Vec<usize>,
}

impl Frontier {
    pub fn pareto_points(&self) -> impl Iterator<Item = &TradeoffPoint> {
        self.pareto.iter().map(|&i| &self.points[i])
    }
}

/// `0` followed by `points` log-spaced values from `min` to `max`.
pub fn lambda_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(Error::Usage(format!(
            "lambda range [{min}, {max}] must satisfy 0 < min <= max"
        )));
    }
    let mut grid = Vec::with_capacity(points + 1);
    grid.push(0.0);
    let (lo, hi) = (libm::log10(min), libm::log10(max));
    for k in 0..points {
        let t = if points == 1 {
            0.0
        } else {
            k as f64 / (points - 1) as f64
        };
        grid.push(libm::pow(10.0, lo + t * (hi - lo)));
    }
    Ok(grid)
}

/// `0` plus 33 log-spaced values in `[1e-3, 1e3]`.
pub fn default_lambda_grid() -> Vec<f64> {
    lambda_grid(1e-3, 1e3, 33).expect("static range is valid")
}

/// Indices of points not dominated in (higher `i_y_z`, lower `i_z_s`).
///
/// Points equal within round-off keep only the first occurrence. The result
/// is sorted by decreasing `i_z_s`, which makes `i_y_z` decreasing too.
pub fn pareto_filter(points: &[(f64, f64)]) -> Vec<usize> {
    let dominated = |i: usize| {
        let (yi, si) = points[i];
        points.iter().enumerate().any(|(j, &(yj, sj))| {
            if j == i {
                return false;
            }
            let no_worse = yj >= yi - TIE_TOLERANCE && sj <= si + TIE_TOLERANCE;
            let better = yj > yi + TIE_TOLERANCE || sj < si - TIE_TOLERANCE;
            // exact duplicates: the earlier one survives
            no_worse && (better || j < i)
        })
    };
    let mut keep: Vec<usize> = (0..points.len()).filter(|&i| !dominated(i)).collect();
    keep.sort_by(|&a, &b| points[b].1.total_cmp(&points[a].1).then(a.cmp(&b)));
    keep
}

/// Optimizes one encoder per grid value and extracts the Pareto subset.
pub fn sweep_frontier(
    joint: &JointDistribution,
    lambda_grid: &[f64],
    mode: ObjectiveMode,
    opts: &OptimizeOptions,
) -> Result<Frontier> {
    if lambda_grid.is_empty() {
        return Err(Error::Usage("lambda grid is empty".into()));
    }
    if lambda_grid.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::Usage("lambda grid values must be finite and >= 0".into()));
    }
    if lambda_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Usage("lambda grid must be sorted ascending".into()));
    }
    let points = lambda_grid
        .iter()
        .map(|&lambda| lagrangian_optimize(joint, lambda, mode, opts))
        .collect::<Result<Vec<_>>>()?;
    let coords: Vec<(f64, f64)> = points.iter().map(|p| (p.report.i_y_z, p.report.i_z_s)).collect();
    Ok(Frontier {
        mode,
        pareto: pareto_filter(&coords),
        points,
    })
}
