use alloc::format;
use alloc::vec::Vec;

use super::{S_AXIS, X_AXIS, Y_AXIS};
use crate::prob::{conditional_mutual_information, mutual_information, JointDistribution};
use crate::{Error, Result};

/// Per-site label information `I(y, x | s = s')` and its minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteInformationProfile {
    /// `(site, I(y, x | s = site))` for every site with positive mass.
    pub per_site: Vec<(usize, f64)>,
    /// Sites with zero mass; these have no conditional information.
    pub skipped_sites: Vec<usize>,
    /// Least informative site (lowest index on ties).
    pub minimum_site: usize,
    pub minimum_value: f64,
    /// `I(y, x)` with sites pooled.
    pub unconditional: f64,
    /// `I(y, x | s)`, the mass-weighted average of `per_site`.
    pub conditional_average: f64,
}

impl SiteInformationProfile {
    pub fn site_value(&self, site: usize) -> Option<f64> {
        self.per_site.iter().find(|(s, _)| *s == site).map(|(_, v)| *v)
    }
}

fn check_ysx(joint: &JointDistribution) -> Result<()> {
    if joint.rank() < 3 {
        return Err(Error::Usage(format!(
            "expected a joint over (Y, S, X), got rank {}",
            joint.rank()
        )));
    }
    Ok(())
}

/// Information profile of a built `(Y, S, X)` joint.
pub fn per_site_information(joint: &JointDistribution) -> Result<SiteInformationProfile> {
    check_ysx(joint)?;
    let cmi = conditional_mutual_information(joint, &[Y_AXIS], &[X_AXIS], S_AXIS)?;
    let (minimum_site, minimum_value) = cmi
        .minimum()
        .ok_or_else(|| Error::Usage("no site carries positive mass".into()))?;
    let per_site = cmi
        .per_value
        .iter()
        .enumerate()
        .filter_map(|(s, v)| v.map(|v| (s, v)))
        .collect();
    Ok(SiteInformationProfile {
        per_site,
        skipped_sites: cmi.skipped(),
        minimum_site,
        minimum_value,
        unconditional: mutual_information(joint, &[Y_AXIS], &[X_AXIS])?,
        conditional_average: cmi.total,
    })
}

/// Which sites a label is observed at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSupport {
    pub label: usize,
    /// Sites `s` with `p(y = label, s) > 0`, ascending.
    pub sites: Vec<usize>,
}

impl LabelSupport {
    /// Observed at exactly one site.
    pub fn is_exclusive(&self) -> bool {
        self.sites.len() == 1
    }

    /// Never observed at all.
    pub fn is_degenerate(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Site support of every label, from axes `Y` (0) and `S` (1).
pub fn site_exclusive_labels(joint: &JointDistribution) -> Result<Vec<LabelSupport>> {
    if joint.rank() < 2 {
        return Err(Error::Usage("site support needs Y and S axes".into()));
    }
    let ys = joint.marginalize(&[Y_AXIS, S_AXIS])?;
    let ns = ys.axis(1).size();
    Ok(ys
        .mass()
        .chunks_exact(ns)
        .enumerate()
        .map(|(label, row)| LabelSupport {
            label,
            sites: row
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(s, _)| s)
                .collect(),
        })
        .collect())
}
