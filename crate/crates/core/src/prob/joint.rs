use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Alphabet, MAX_DENSE_ENTRIES, RAW_SUM_TOLERANCE};
use crate::{Error, Result};

/// Dense, unit-normalized probability tensor over an ordered list of axes.
///
/// Storage is row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axes: Vec<Alphabet>,
    strides: Vec<usize>,
    mass: Vec<f64>,
}

pub(crate) fn checked_cells(sizes: impl IntoIterator<Item = usize>) -> Result<usize> {
    let mut cells: u128 = 1;
    for size in sizes {
        cells = cells.saturating_mul(size as u128);
    }
    if cells > MAX_DENSE_ENTRIES as u128 {
        return Err(Error::Capacity {
            what: "dense joint distribution",
            requested: cells,
            limit: MAX_DENSE_ENTRIES as u128,
        });
    }
    Ok(cells as usize)
}

fn strides_for(axes: &[Alphabet]) -> Vec<usize> {
    let mut strides = vec![1; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * axes[i + 1].size();
    }
    strides
}

impl JointDistribution {
    /// Validates `mass` against `axes` and renormalizes it.
    ///
    /// Entries must be finite and nonnegative, and the raw total must be
    /// within `RAW_SUM_TOLERANCE` of one.
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Usage("a joint distribution needs at least one axis".into()));
        }
        let cells = checked_cells(axes.iter().map(Alphabet::size))?;
        if mass.len() != cells {
            return Err(Error::Validation(format!(
                "mass has {} entries but the axes need {cells}",
                mass.len()
            )));
        }
        if let Some(bad) = mass.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Validation(format!(
                "mass entries must be finite and >= 0, found {bad}"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > RAW_SUM_TOLERANCE {
            return Err(Error::Validation(format!("mass sums to {total}, expected 1")));
        }
        Ok(Self::renormalized(axes, mass, total))
    }

    /// Builds from a table that is normalized up to accumulated round-off.
    pub(crate) fn from_derived(axes: Vec<Alphabet>, mass: Vec<f64>) -> Self {
        let total: f64 = mass.iter().sum();
        debug_assert!((total - 1.0).abs() <= RAW_SUM_TOLERANCE, "derived mass sums to {total}");
        // Summation drift at this level is already inside the normalization
        // invariant; dividing would only perturb the low bits.
        if (total - 1.0).abs() <= 1e-14 {
            return Self::renormalized(axes, mass, 1.0);
        }
        Self::renormalized(axes, mass, total)
    }

    fn renormalized(axes: Vec<Alphabet>, mut mass: Vec<f64>, total: f64) -> Self {
        if total != 1.0 {
            mass.iter_mut().for_each(|p| *p /= total);
        }
        let strides = strides_for(&axes);
        Self { axes, strides, mass }
    }

    /// Single-axis distribution.
    pub fn from_probs(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        Self::new(vec![alphabet], probs)
    }

    /// Uniform distribution over the cartesian product of `axes`.
    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        let cells = checked_cells(axes.iter().map(Alphabet::size))?;
        Self::new(axes, vec![1.0 / cells as f64; cells])
    }

    /// Independent product `p(a) p(b)`, axes of `a` first.
    pub fn product(a: &JointDistribution, b: &JointDistribution) -> Result<Self> {
        let axes: Vec<Alphabet> = a.axes.iter().chain(&b.axes).cloned().collect();
        checked_cells(axes.iter().map(Alphabet::size))?;
        let mass = a
            .mass
            .iter()
            .flat_map(|pa| b.mass.iter().map(move |pb| pa * pb))
            .collect();
        Ok(Self::from_derived(axes, mass))
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn axis(&self, index: usize) -> &Alphabet {
        &self.axes[index]
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::size).collect()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Position of the axis called `name`.
    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name() == name)
    }

    /// Probability of one cell.
    pub fn get(&self, coords: &[usize]) -> f64 {
        assert_eq!(coords.len(), self.rank(), "coordinate rank mismatch");
        let flat: usize = coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum();
        self.mass[flat]
    }

    pub(crate) fn coord(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.axes[axis].size()
    }

    pub(crate) fn check_axes(&self, axes: &[usize], what: &str) -> Result<()> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.rank() {
                return Err(Error::Usage(format!(
                    "{what}: axis {a} out of range for a rank-{} joint",
                    self.rank()
                )));
            }
            if axes[..i].contains(&a) {
                return Err(Error::Usage(format!("{what}: axis {a} listed twice")));
            }
        }
        Ok(())
    }

    /// Sums out every axis not in `keep`; the result's axes follow `keep`'s order.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Usage("marginalize: keep set is empty".into()));
        }
        self.check_axes(keep, "marginalize")?;
        if keep.len() == self.rank() && keep.iter().enumerate().all(|(i, &a)| i == a) {
            return Ok(self.clone());
        }
        let axes: Vec<Alphabet> = keep.iter().map(|&a| self.axes[a].clone()).collect();
        let target_strides = strides_for(&axes);
        let cells: usize = axes.iter().map(Alphabet::size).product();
        let mut mass = vec![0.0; cells];
        for (flat, &p) in self.mass.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let target: usize = keep
                .iter()
                .zip(&target_strides)
                .map(|(&a, &s)| self.coord(flat, a) * s)
                .sum();
            mass[target] += p;
        }
        Ok(Self::from_derived(axes, mass))
    }

    /// The renormalized slice `p(. | axis = value)` over the remaining axes.
    pub fn condition(&self, axis: usize, value: usize) -> Result<Self> {
        self.check_axes(&[axis], "condition")?;
        if self.rank() < 2 {
            return Err(Error::Usage("condition: need at least two axes".into()));
        }
        if value >= self.axes[axis].size() {
            return Err(Error::Usage(format!(
                "condition: value {value} out of range for axis `{}`",
                self.axes[axis].name()
            )));
        }
        let slice: Vec<f64> = self
            .mass
            .iter()
            .enumerate()
            .filter(|(flat, _)| self.coord(*flat, axis) == value)
            .map(|(_, &p)| p)
            .collect();
        let total: f64 = slice.iter().sum();
        if total <= 0.0 {
            return Err(Error::UnsupportedCondition {
                axis: self.axes[axis].name().into(),
                value,
            });
        }
        let axes: Vec<Alphabet> = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != axis)
            .map(|(_, a)| a.clone())
            .collect();
        Ok(Self::renormalized(axes, slice, total))
    }

    /// Reorders axes; `order` must be a permutation of `0..rank`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rank() {
            return Err(Error::Usage("permute: order must list every axis".into()));
        }
        self.marginalize(order)
    }
}
