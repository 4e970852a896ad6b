//! Penalized encoder optimization over row-stochastic tables.
//!
//! Info mode maximizes `I(y; z) - lambda I(z; s)`; risk mode minimizes
//! `risk + lambda I(z; s)`. Both run projected gradient ascent on the
//! encoder table with per-row Euclidean simplex projection and a
//! backtracking (Armijo) step, restarted from random tables and from the
//! best deterministic encoder.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::enumerate::{map_count, next_map};
use super::{evaluate_encoder, Encoder, EncoderProblem, InformationReport};
use crate::prob::{checked_cells, JointDistribution};
use crate::scenario::X_AXIS;
use crate::{Error, Result};

/// Deterministic warm starts are only searched exhaustively up to this many maps.
const WARM_START_CAP: usize = 100_000;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const MAX_STEP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Maximize `I(y; z) - lambda I(z; s)`.
    Info,
    /// Minimize `risk + lambda I(z; s)`.
    Risk,
}

impl ObjectiveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveMode::Info => "info",
            ObjectiveMode::Risk => "risk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Halve from the previous accepted step (doubled) until sufficient increase.
    Backtracking,
    /// Constant step, always accepted.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Encoder output size; `None` means `|X|`.
    pub z_size: Option<usize>,
    /// Total restarts, including the deterministic warm start.
    pub restarts: usize,
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Stop once the objective moves less than this in one iteration.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            z_size: None,
            restarts: 16,
            max_iters: 10_000,
            step_rule: StepRule::Backtracking,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

/// One optimized operating point of the trade-off.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub lambda: f64,
    pub mode: ObjectiveMode,
    pub encoder: Encoder,
    pub report: InformationReport,
    /// `i_y_z - lambda i_z_s` (info) or `risk + lambda i_z_s` (risk), from `report`.
    pub objective_value: f64,
    pub converged: bool,
    pub restarts_used: usize,
}

/// Euclidean projection of `v` onto the probability simplex, in place.
pub fn project_to_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
    // clean up drift so rows stay stochastic to round-off
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
}

fn project_rows(table: &mut [f64], nz: usize) {
    for row in table.chunks_exact_mut(nz) {
        project_to_simplex(row);
    }
}

struct Run {
    table: Vec<f64>,
    value: f64,
    converged: bool,
}

fn ascend(
    problem: &EncoderProblem,
    mut table: Vec<f64>,
    nz: usize,
    lambda: f64,
    mode: ObjectiveMode,
    opts: &OptimizeOptions,
) -> Run {
    let mut value = problem.ascent_value(&table, nz, lambda, mode);
    let mut step = 1.0;
    let mut candidate = vec![0.0; table.len()];
    for _ in 0..opts.max_iters {
        let grad = problem.ascent_gradient(&table, nz, lambda, mode);
        let mut accepted = None;
        match opts.step_rule {
            StepRule::Fixed(fixed) => {
                for ((c, q), g) in candidate.iter_mut().zip(&table).zip(&grad) {
                    *c = q + fixed * g;
                }
                project_rows(&mut candidate, nz);
                accepted = Some(problem.ascent_value(&candidate, nz, lambda, mode));
            }
            StepRule::Backtracking => {
                for _ in 0..MAX_HALVINGS {
                    for ((c, q), g) in candidate.iter_mut().zip(&table).zip(&grad) {
                        *c = q + step * g;
                    }
                    project_rows(&mut candidate, nz);
                    let ascent: f64 = candidate
                        .iter()
                        .zip(&table)
                        .zip(&grad)
                        .map(|((c, q), g)| g * (c - q))
                        .sum();
                    if ascent <= 0.0 {
                        // projected gradient vanished: stationary
                        return Run {
                            table,
                            value,
                            converged: true,
                        };
                    }
                    let next = problem.ascent_value(&candidate, nz, lambda, mode);
                    if next >= value + ARMIJO * ascent {
                        accepted = Some(next);
                        break;
                    }
                    step *= 0.5;
                }
            }
        }
        let Some(next) = accepted else {
            return Run {
                table,
                value,
                converged: true,
            };
        };
        let change = next - value;
        core::mem::swap(&mut table, &mut candidate);
        value = next;
        if change.abs() < opts.tolerance {
            return Run {
                table,
                value,
                converged: true,
            };
        }
        step = (step * 2.0).min(MAX_STEP);
    }
    Run {
        table,
        value,
        converged: false,
    }
}

fn random_table(rng: &mut ChaCha8Rng, nx: usize, nz: usize) -> Vec<f64> {
    // normalized exponentials are uniform on the simplex
    let mut table: Vec<f64> = (0..nx * nz).map(|_| Exp1.sample(rng)).collect();
    for row in table.chunks_exact_mut(nz) {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|q| *q /= total);
    }
    table
}

fn map_table(map: &[usize], nz: usize) -> Vec<f64> {
    let mut table = vec![0.0; map.len() * nz];
    for (x, &z) in map.iter().enumerate() {
        table[x * nz + z] = 1.0;
    }
    table
}

/// Deterministic map with the best penalized objective, or `x mod nz` when
/// there are too many maps to search.
fn warm_start(problem: &EncoderProblem, nz: usize, lambda: f64, mode: ObjectiveMode) -> Vec<f64> {
    let nx = problem.x_size();
    match map_count(nx, nz) {
        Ok(count) if count <= WARM_START_CAP => {
            let mut map = vec![0; nx];
            let mut best = (map.clone(), f64::NEG_INFINITY);
            loop {
                let table = map_table(&map, nz);
                let value = problem.ascent_value(&table, nz, lambda, mode);
                if value > best.1 {
                    best = (map.clone(), value);
                }
                if !next_map(&mut map, nz) {
                    break;
                }
            }
            map_table(&best.0, nz)
        }
        _ => map_table(&(0..nx).map(|x| x % nz).collect::<Vec<_>>(), nz),
    }
}

/// Optimizes an encoder for a single `lambda`.
pub fn lagrangian_optimize(
    joint: &JointDistribution,
    lambda: f64,
    mode: ObjectiveMode,
    opts: &OptimizeOptions,
) -> Result<TradeoffPoint> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Usage(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if opts.restarts == 0 {
        return Err(Error::Usage("at least one restart is required".into()));
    }
    let problem = EncoderProblem::new(joint)?;
    let nx = problem.x_size();
    let nz = opts.z_size.unwrap_or(nx);
    if nz == 0 {
        return Err(Error::Usage("z_size must be at least 1".into()));
    }
    checked_cells([nx, nz])?;

    let mut best: Option<Run> = None;
    for restart in 0..opts.restarts {
        let start = if restart == 0 {
            warm_start(&problem, nz, lambda, mode)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(restart as u64);
            random_table(&mut rng, nx, nz)
        };
        let run = ascend(&problem, start, nz, lambda, mode, opts);
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");

    let encoder = Encoder::from_table(joint.axis(X_AXIS), nz, best.table)?;
    let report = evaluate_encoder(joint, &encoder)?;
    let objective_value = match mode {
        ObjectiveMode::Info => report.i_y_z - lambda * report.i_z_s,
        ObjectiveMode::Risk => report.risk + lambda * report.i_z_s,
    };
    Ok(TradeoffPoint {
        lambda,
        mode,
        encoder,
        report,
        objective_value,
        converged: best.converged,
        restarts_used: opts.restarts,
    })
}
