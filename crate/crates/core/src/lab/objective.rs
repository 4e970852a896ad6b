//! Fast evaluation of encoder tables against the sufficient marginals
//! `p(y, x)` and `p(s, x)`.
//!
//! Encoder tables are row-major `|X| x |Z|` slices. The information terms
//! are defined for any nonnegative table, not only row-stochastic ones:
//! `I(y; z) = sum p(y, z) log2 [p(y, z) / (p(y) p(z))]` with `p(y)` held
//! fixed and `p(z) = sum_y p(y, z)`. On the simplex this is the ordinary
//! mutual information, and off it the gradient below is still exact.

use alloc::vec;
use alloc::vec::Vec;

use super::ObjectiveMode;
use crate::prob::{mutual_information_table, JointDistribution};
use crate::scenario::{S_AXIS, X_AXIS, Y_AXIS};
use crate::{Error, Result};

/// Stand-in for `log2 0` when a gradient term sits on a zero cell.
const LOG2_FLOOR: f64 = -1024.0;

/// The parts of a `(Y, S, X)` joint an encoder can interact with.
#[derive(Debug, Clone)]
pub struct EncoderProblem {
    ny: usize,
    ns: usize,
    nx: usize,
    p_yx: Vec<f64>,
    p_sx: Vec<f64>,
    p_y: Vec<f64>,
    p_s: Vec<f64>,
    p_x: Vec<f64>,
}

/// Rows-by-columns product `joint (a x nx) * table (nx x nz)`.
fn push(joint: &[f64], rows: usize, nx: usize, table: &[f64], nz: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * nz];
    for r in 0..rows {
        for x in 0..nx {
            let p = joint[r * nx + x];
            if p == 0.0 {
                continue;
            }
            let q = &table[x * nz..(x + 1) * nz];
            for (cell, &w) in out[r * nz..(r + 1) * nz].iter_mut().zip(q) {
                *cell += p * w;
            }
        }
    }
    out
}

fn info_fixed_rows(joint: &[f64], rows: usize, row_mass: &[f64], col_mass: &[f64]) -> f64 {
    let nz = col_mass.len();
    let mut info = 0.0;
    for r in 0..rows {
        for z in 0..nz {
            let p = joint[r * nz + z];
            if p > 0.0 {
                info += p * libm::log2(p / (row_mass[r] * col_mass[z]));
            }
        }
    }
    info
}

fn column_mass(joint: &[f64], nz: usize) -> Vec<f64> {
    let mut cols = vec![0.0; nz];
    for row in joint.chunks_exact(nz) {
        for (c, p) in cols.iter_mut().zip(row) {
            *c += p;
        }
    }
    cols
}

impl EncoderProblem {
    pub fn new(joint: &JointDistribution) -> Result<Self> {
        if joint.rank() != 3 {
            return Err(Error::Usage("encoder problems need a (Y, S, X) joint".into()));
        }
        let yx = joint.marginalize(&[Y_AXIS, X_AXIS])?;
        let sx = joint.marginalize(&[S_AXIS, X_AXIS])?;
        let (ny, ns, nx) = (yx.axis(0).size(), sx.axis(0).size(), yx.axis(1).size());
        let p_yx = yx.mass().to_vec();
        let p_sx = sx.mass().to_vec();
        let p_y = p_yx.chunks_exact(nx).map(|r| r.iter().sum()).collect();
        let p_s = p_sx.chunks_exact(nx).map(|r| r.iter().sum()).collect();
        let p_x = column_mass(&p_yx, nx);
        Ok(Self {
            ny,
            ns,
            nx,
            p_yx,
            p_sx,
            p_y,
            p_s,
            p_x,
        })
    }

    pub fn x_size(&self) -> usize {
        self.nx
    }

    pub fn label_size(&self) -> usize {
        self.ny
    }

    /// `p(y, z)` as a row-major `|Y| x nz` table.
    pub fn label_table(&self, table: &[f64], nz: usize) -> Vec<f64> {
        push(&self.p_yx, self.ny, self.nx, table, nz)
    }

    /// `p(s, z)` as a row-major `|S| x nz` table.
    pub fn site_table(&self, table: &[f64], nz: usize) -> Vec<f64> {
        push(&self.p_sx, self.ns, self.nx, table, nz)
    }

    /// `(I(y; z), I(z; s))` for a row-stochastic table. Unclamped.
    pub fn information(&self, table: &[f64], nz: usize) -> (f64, f64) {
        let yz = self.label_table(table, nz);
        let sz = self.site_table(table, nz);
        (
            mutual_information_table(&yz, self.ny, nz),
            mutual_information_table(&sz, self.ns, nz),
        )
    }

    /// Same as [`information`](Self::information) for a deterministic map.
    pub fn map_information(&self, map: &[usize], nz: usize) -> (f64, f64) {
        let mut yz = vec![0.0; self.ny * nz];
        let mut sz = vec![0.0; self.ns * nz];
        for (x, &z) in map.iter().enumerate() {
            for y in 0..self.ny {
                yz[y * nz + z] += self.p_yx[y * self.nx + x];
            }
            for s in 0..self.ns {
                sz[s * nz + z] += self.p_sx[s * self.nx + x];
            }
        }
        (
            mutual_information_table(&yz, self.ny, nz),
            mutual_information_table(&sz, self.ns, nz),
        )
    }

    fn risk_of(&self, yz: &[f64], nz: usize) -> f64 {
        let correct: f64 = (0..nz)
            .map(|z| (0..self.ny).map(|y| yz[y * nz + z]).fold(0.0, f64::max))
            .sum();
        1.0 - correct
    }

    /// 0-1 risk of the Bayes decision on `z`.
    pub fn risk(&self, table: &[f64], nz: usize) -> f64 {
        self.risk_of(&self.label_table(table, nz), nz)
    }

    /// The quantity the optimizer maximizes: `I(y; z) - lambda I(z; s)` in
    /// info mode, `-(risk + lambda I(z; s))` in risk mode.
    pub fn ascent_value(&self, table: &[f64], nz: usize, lambda: f64, mode: ObjectiveMode) -> f64 {
        let yz = self.label_table(table, nz);
        let sz = self.site_table(table, nz);
        let pz = column_mass(&sz, nz);
        let site_info = info_fixed_rows(&sz, self.ns, &self.p_s, &pz);
        let penalty = if lambda == 0.0 { 0.0 } else { lambda * site_info };
        match mode {
            ObjectiveMode::Info => info_fixed_rows(&yz, self.ny, &self.p_y, &pz) - penalty,
            ObjectiveMode::Risk => -(self.risk_of(&yz, nz) + penalty),
        }
    }

    /// Gradient of [`ascent_value`](Self::ascent_value) with respect to every
    /// table entry. In risk mode the Bayes term contributes a subgradient.
    pub fn ascent_gradient(&self, table: &[f64], nz: usize, lambda: f64, mode: ObjectiveMode) -> Vec<f64> {
        let yz = self.label_table(table, nz);
        let sz = self.site_table(table, nz);
        let pz = column_mass(&sz, nz);
        let mut grad = vec![0.0; self.nx * nz];

        // d/dq[x,z] sum_r p(r,z) log2 p(r,z)/(p(r) p(z)) = sum_r p(r,x) log2 p(r,z)/(p(r) p(z))
        let add_info = |grad: &mut [f64], joint_rx: &[f64], joint_rz: &[f64], row_mass: &[f64], weight: f64| {
            let rows = row_mass.len();
            for x in 0..self.nx {
                if self.p_x[x] == 0.0 {
                    continue;
                }
                for z in 0..nz {
                    let mut g = 0.0;
                    for r in 0..rows {
                        let p_rx = joint_rx[r * self.nx + x];
                        if p_rx == 0.0 {
                            continue;
                        }
                        let p_rz = joint_rz[r * nz + z];
                        let log_ratio = if pz[z] > 0.0 {
                            if p_rz > 0.0 {
                                libm::log2(p_rz / (row_mass[r] * pz[z]))
                            } else {
                                LOG2_FLOOR
                            }
                        } else {
                            // unused column: one-sided derivative along q[x, z]
                            libm::log2(p_rx / (self.p_x[x] * row_mass[r]))
                        };
                        g += p_rx * log_ratio;
                    }
                    grad[x * nz + z] += weight * g;
                }
            }
        };

        match mode {
            ObjectiveMode::Info => add_info(&mut grad, &self.p_yx, &yz, &self.p_y, 1.0),
            ObjectiveMode::Risk => {
                for z in 0..nz {
                    let mut best = 0;
                    for y in 1..self.ny {
                        if yz[y * nz + z] > yz[best * nz + z] {
                            best = y;
                        }
                    }
                    for x in 0..self.nx {
                        grad[x * nz + z] += self.p_yx[best * self.nx + x];
                    }
                }
            }
        }
        if lambda != 0.0 {
            add_info(&mut grad, &self.p_sx, &sz, &self.p_s, -lambda);
        }
        grad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_joint, presets};

    #[test]
    fn matches_exact_engine() {
        let joint = build_joint(&presets::site_exclusive()).unwrap();
        let problem = EncoderProblem::new(&joint).unwrap();
        let table = [0.7, 0.3, 0.2, 0.8, 0.5, 0.5];
        let (iyz, izs) = problem.information(&table, 2);
        let encoder = super::super::Encoder::from_table(joint.axis(2), 2, table.to_vec()).unwrap();
        let report = super::super::evaluate_encoder(&joint, &encoder).unwrap();
        assert!((iyz - report.i_y_z).abs() < 1e-12);
        assert!((izs - report.i_z_s).abs() < 1e-12);
        assert!((problem.risk(&table, 2) - report.risk).abs() < 1e-12);
        let value = problem.ascent_value(&table, 2, 2.0, ObjectiveMode::Info);
        assert!((value - (iyz - 2.0 * izs)).abs() < 1e-12);
    }

    #[test]
    fn map_information_agrees_with_table() {
        let joint = build_joint(&presets::two_site_bsc(0.1, 0.4)).unwrap();
        let problem = EncoderProblem::new(&joint).unwrap();
        let (a, b) = problem.map_information(&[1, 0], 2);
        let (c, d) = problem.information(&[0.0, 1.0, 1.0, 0.0], 2);
        assert!((a - c).abs() < 1e-15 && (b - d).abs() < 1e-15);
    }
}
