//! Entropy, mutual information and channel pushes, all in bits.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::joint::checked_cells;
use super::{Alphabet, Channel, JointDistribution, NEGATIVE_INFORMATION_TOLERANCE, RAW_SUM_TOLERANCE};
use crate::{Error, Result};

/// `-sum p log2 p` with `0 log 0 = 0`. No validation.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * libm::log2(p))
        .sum::<f64>()
}

/// Clamps tiny negative round-off to zero and rejects anything worse.
pub(crate) fn clamp_information(value: f64, quantity: &'static str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_INFORMATION_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::Numerical { quantity, value })
    }
}

/// Mutual information of a row-major `rows x cols` table that sums to one.
/// Unclamped; rows and columns with zero mass are skipped.
pub(crate) fn mutual_information_table(table: &[f64], rows: usize, cols: usize) -> f64 {
    debug_assert_eq!(table.len(), rows * cols);
    let mut col_mass = vec![0.0; cols];
    for row in table.chunks_exact(cols) {
        for (c, &p) in col_mass.iter_mut().zip(row) {
            *c += p;
        }
    }
    // a constant on either side carries no information; skip the round-off
    let live_rows = table.chunks_exact(cols).filter(|r| r.iter().any(|&p| p > 0.0)).count();
    if live_rows <= 1 || col_mass.iter().filter(|&&p| p > 0.0).count() <= 1 {
        return 0.0;
    }
    let log_cols: Vec<f64> = col_mass
        .iter()
        .map(|&p| if p > 0.0 { libm::log2(p) } else { 0.0 })
        .collect();
    let mut info = 0.0;
    for row in table.chunks_exact(cols) {
        let row_mass: f64 = row.iter().sum();
        if row_mass <= 0.0 {
            continue;
        }
        let log_row = libm::log2(row_mass);
        for (&p, &log_col) in row.iter().zip(&log_cols) {
            if p > 0.0 {
                info += p * (libm::log2(p) - log_row - log_col);
            }
        }
    }
    info
}

/// Entropy in bits of a probability vector, validating it first.
pub fn entropy_of(probs: &[f64]) -> Result<f64> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Validation(
            "entropy: probabilities must be finite and >= 0".into(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > RAW_SUM_TOLERANCE {
        return Err(Error::Validation(format!("entropy: probabilities sum to {total}")));
    }
    Ok(entropy_bits(probs).max(0.0))
}

/// Entropy in bits of a single-axis distribution.
pub fn entropy(dist: &JointDistribution) -> Result<f64> {
    if dist.rank() != 1 {
        return Err(Error::Usage(format!(
            "entropy expects a single-axis distribution, got rank {}",
            dist.rank()
        )));
    }
    Ok(entropy_bits(dist.mass()).max(0.0))
}

/// Entropy in bits of all axes taken jointly.
pub fn joint_entropy(dist: &JointDistribution) -> f64 {
    entropy_bits(dist.mass()).max(0.0)
}

/// `h2(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binary entropy of {p} outside [0, 1]")));
    }
    Ok(entropy_bits(&[p, 1.0 - p]).max(0.0))
}

fn check_groups(joint: &JointDistribution, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("mutual information needs two nonempty axis groups".into()));
    }
    joint.check_axes(a, "mutual information")?;
    joint.check_axes(b, "mutual information")?;
    if let Some(shared) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::Usage(format!("axis {shared} appears in both groups")));
    }
    Ok(())
}

fn group_size(joint: &JointDistribution, group: &[usize]) -> usize {
    group.iter().map(|&a| joint.axis(a).size()).product()
}

/// `I(A; B)` in bits between the axis groups `a` and `b`.
///
/// Axes in neither group are summed out.
pub fn mutual_information(joint: &JointDistribution, a: &[usize], b: &[usize]) -> Result<f64> {
    check_groups(joint, a, b)?;
    let keep: Vec<usize> = a.iter().chain(b).copied().collect();
    let table = joint.marginalize(&keep)?;
    let value = mutual_information_table(table.mass(), group_size(joint, a), group_size(joint, b));
    clamp_information(value, "mutual information")
}

/// `I(A; B | C)` together with the per-value terms `I(A; B | C = c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMutualInformation {
    /// `sum_c p(c) I(A; B | C = c)`.
    pub total: f64,
    /// `I(A; B | C = c)`, `None` where `p(c) = 0`.
    pub per_value: Vec<Option<f64>>,
    /// `p(c)`.
    pub weights: Vec<f64>,
}

impl ConditionalMutualInformation {
    /// Values of the conditioning axis that carry no mass.
    pub fn skipped(&self) -> Vec<usize> {
        self.per_value
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(c, _)| c)
            .collect()
    }

    /// Smallest per-value term and the value attaining it (lowest index on ties).
    pub fn minimum(&self) -> Option<(usize, f64)> {
        self.per_value
            .iter()
            .enumerate()
            .filter_map(|(c, v)| v.map(|v| (c, v)))
            .fold(None, |best, (c, v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((c, v)),
            })
    }
}

/// `I(A; B | C)` in bits for axis groups `a`, `b` and conditioning axis `c`.
pub fn conditional_mutual_information(
    joint: &JointDistribution,
    a: &[usize],
    b: &[usize],
    c: usize,
) -> Result<ConditionalMutualInformation> {
    check_groups(joint, a, b)?;
    joint.check_axes(&[c], "conditional mutual information")?;
    if a.contains(&c) || b.contains(&c) {
        return Err(Error::Usage(format!(
            "conditioning axis {c} overlaps an information group"
        )));
    }
    let keep: Vec<usize> = core::iter::once(c)
        .chain(a.iter().copied())
        .chain(b.iter().copied())
        .collect();
    let table = joint.marginalize(&keep)?;
    let (rows, cols) = (group_size(joint, a), group_size(joint, b));
    let block = rows * cols;
    let mut per_value = Vec::with_capacity(joint.axis(c).size());
    let mut weights = Vec::with_capacity(joint.axis(c).size());
    let mut total = 0.0;
    for slice in table.mass().chunks_exact(block) {
        let weight: f64 = slice.iter().sum();
        weights.push(weight);
        if weight <= 0.0 {
            per_value.push(None);
            continue;
        }
        let normalized: Vec<f64> = slice.iter().map(|p| p / weight).collect();
        let value = clamp_information(
            mutual_information_table(&normalized, rows, cols),
            "conditional mutual information",
        )?;
        total += weight * value;
        per_value.push(Some(value));
    }
    Ok(ConditionalMutualInformation {
        total: clamp_information(total, "conditional mutual information")?,
        per_value,
        weights,
    })
}

/// How the channel output enters the resulting joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushMode {
    /// The channel input axis is replaced by the output axis in place.
    Replace,
    /// The output axis is appended after all existing axes.
    Append,
}

/// Sends axis `axis` of `joint` through `channel`.
///
/// The new axis depends on the rest of the joint only through `axis`, so the
/// result is Markov by construction.
pub fn push_through_channel(
    joint: &JointDistribution,
    axis: usize,
    channel: &Channel,
    mode: PushMode,
) -> Result<JointDistribution> {
    joint.check_axes(&[axis], "push through channel")?;
    if !channel.input().compatible(joint.axis(axis)) {
        return Err(Error::Usage(format!(
            "channel input `{}` ({} symbols) does not match axis `{}` ({} symbols)",
            channel.input().name(),
            channel.input().size(),
            joint.axis(axis).name(),
            joint.axis(axis).size()
        )));
    }
    let out = channel.output().size();
    match mode {
        PushMode::Append => {
            let mut axes: Vec<Alphabet> = joint.axes().to_vec();
            axes.push(channel.output().clone());
            let cells = checked_cells(axes.iter().map(Alphabet::size))?;
            let mut mass = Vec::with_capacity(cells);
            for (flat, &p) in joint.mass().iter().enumerate() {
                let row = channel.row(joint.coord(flat, axis));
                mass.extend(row.iter().map(|q| p * q));
            }
            Ok(JointDistribution::from_derived(axes, mass))
        }
        PushMode::Replace => {
            let mut axes: Vec<Alphabet> = joint.axes().to_vec();
            axes[axis] = channel.output().clone();
            let cells = checked_cells(axes.iter().map(Alphabet::size))?;
            // Strides of the output tensor: the replaced axis changes size.
            let sizes: Vec<usize> = axes.iter().map(Alphabet::size).collect();
            let mut strides = vec![1usize; sizes.len()];
            for i in (0..sizes.len() - 1).rev() {
                strides[i] = strides[i + 1] * sizes[i + 1];
            }
            let mut mass = vec![0.0; cells];
            for (flat, &p) in joint.mass().iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let mut base = 0;
                for (k, &stride) in strides.iter().enumerate() {
                    if k != axis {
                        base += joint.coord(flat, k) * stride;
                    }
                }
                let row = channel.row(joint.coord(flat, axis));
                for (z, &q) in row.iter().enumerate().take(out) {
                    mass[base + z * strides[axis]] += p * q;
                }
            }
            Ok(JointDistribution::from_derived(axes, mass))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit(name: &str) -> Alphabet {
        Alphabet::new(name, 2).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn entropy_examples() {
        let u4 = JointDistribution::uniform(vec![Alphabet::new("a", 4).unwrap()]).unwrap();
        close(entropy(&u4).unwrap(), 2.0, 1e-15);
        let point = JointDistribution::from_probs(Alphabet::new("a", 3).unwrap(), vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(entropy(&point).unwrap(), 0.0);
        let bern = JointDistribution::from_probs(bit("a"), vec![0.1, 0.9]).unwrap();
        close(entropy(&bern).unwrap(), 0.4689956, 5e-8);
        assert!(entropy_of(&[0.5, 0.4]).is_err());
        assert!(entropy(&JointDistribution::uniform(vec![bit("a"), bit("b")]).unwrap()).is_err());
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        close(binary_entropy(0.25).unwrap(), 0.8112781, 5e-8);
        assert!(matches!(binary_entropy(1.5), Err(Error::Domain(_))));
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let indep = JointDistribution::uniform(vec![bit("a"), bit("b")]).unwrap();
        assert_eq!(mutual_information(&indep, &[0], &[1]).unwrap(), 0.0);
        let copy = JointDistribution::new(vec![bit("a"), bit("b")], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        close(mutual_information(&copy, &[0], &[1]).unwrap(), 1.0, 1e-15);
        let bsc = JointDistribution::new(vec![bit("a"), bit("b")], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        close(mutual_information(&bsc, &[0], &[1]).unwrap(), 0.5310044, 5e-8);
        assert!(mutual_information(&bsc, &[0], &[0]).is_err());
        assert!(mutual_information(&bsc, &[0], &[]).is_err());
    }

    #[test]
    fn negative_information_is_reported() {
        assert_eq!(clamp_information(-5e-11, "x").unwrap(), 0.0);
        assert!(matches!(clamp_information(-1e-9, "x"), Err(Error::Numerical { .. })));
    }

    #[test]
    fn xor_conditional_information() {
        // y, s uniform independent bits; x = y xor s.
        let mut mass = vec![0.0; 8];
        for y in 0..2 {
            for s in 0..2 {
                mass[y * 4 + s * 2 + (y ^ s)] = 0.25;
            }
        }
        let j = JointDistribution::new(vec![bit("y"), bit("s"), bit("x")], mass).unwrap();
        assert_eq!(mutual_information(&j, &[0], &[2]).unwrap(), 0.0);
        let cmi = conditional_mutual_information(&j, &[0], &[2], 1).unwrap();
        close(cmi.total, 1.0, 1e-15);
        assert!(conditional_mutual_information(&j, &[0], &[1], 1).is_err());
    }

    #[test]
    fn zero_mass_condition_values_are_skipped() {
        let j = JointDistribution::new(
            vec![bit("a"), bit("b"), bit("c")],
            vec![0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0],
        )
        .unwrap();
        let cmi = conditional_mutual_information(&j, &[0], &[1], 2).unwrap();
        assert_eq!(cmi.per_value[1], None);
        assert_eq!(cmi.skipped(), vec![1]);
        assert_eq!(cmi.minimum(), Some((0, 0.0)));
    }

    #[test]
    fn push_modes() {
        let yx = JointDistribution::new(vec![bit("y"), bit("x")], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let id = Channel::identity(bit("x"));
        assert_eq!(push_through_channel(&yx, 1, &id, PushMode::Replace).unwrap(), yx);
        let constant = Channel::constant(bit("x"), Alphabet::new("z", 3).unwrap(), 0).unwrap();
        let yxz = push_through_channel(&yx, 1, &constant, PushMode::Append).unwrap();
        assert_eq!(yxz.shape(), vec![2, 2, 3]);
        assert_eq!(mutual_information(&yxz, &[2], &[0, 1]).unwrap(), 0.0);
        let wrong = Channel::identity(Alphabet::new("x", 3).unwrap());
        assert!(push_through_channel(&yx, 1, &wrong, PushMode::Append).is_err());
    }

    #[test]
    fn push_replace_on_inner_axis() {
        // axis order (x, y); replace x with a 3-symbol output
        let xy = JointDistribution::new(vec![bit("x"), bit("y")], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let ch = Channel::new(
            bit("x"),
            Alphabet::new("z", 3).unwrap(),
            vec![0.5, 0.5, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let zy = push_through_channel(&xy, 0, &ch, PushMode::Replace).unwrap();
        close(zy.get(&[0, 0]), 0.05, 1e-15);
        close(zy.get(&[1, 1]), 0.1, 1e-15);
        close(zy.get(&[2, 0]), 0.3, 1e-15);
        close(zy.get(&[2, 1]), 0.4, 1e-15);
    }
}
