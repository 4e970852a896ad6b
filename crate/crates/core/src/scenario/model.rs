use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::prob::{Alphabet, Channel, JointDistribution, RAW_SUM_TOLERANCE};
use crate::{Error, Result};

/// Parametric or tabulated scanner channel `p(x | y, s)` at one site.
#[derive(Debug, Clone, PartialEq)]
pub enum ScannerKind {
    /// Binary symmetric channel; binary labels only. Writes to `x in {0, 1}`.
    Bsc { epsilon: f64 },
    /// Reports the label with probability `1 - delta`, otherwise the extra
    /// "erased" symbol (the last observation symbol, index `|Y|`).
    Erasure { delta: f64 },
    /// Row-major `|Y| x x_size` table of `p(x | y)`.
    Explicit { x_size: usize, rows: Vec<f64> },
}

impl ScannerKind {
    /// Minimum observation alphabet size this scanner writes into.
    fn observation_size(&self, labels: usize) -> usize {
        match self {
            ScannerKind::Bsc { .. } => 2,
            ScannerKind::Erasure { .. } => labels + 1,
            ScannerKind::Explicit { x_size, .. } => *x_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScannerModel {
    pub site: usize,
    pub kind: ScannerKind,
}

impl ScannerModel {
    pub fn new(site: usize, kind: ScannerKind) -> Self {
        Self { site, kind }
    }
}

/// How labels and sites are drawn together.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// `p(y, s) = p(y) p(s)`.
    Independent {
        label_prior: Vec<f64>,
        site_prior: Vec<f64>,
    },
    /// Row-major `|Y| x |S|` table of `p(y, s)`. Zero cells declare labels
    /// that never occur at a site.
    Joint { table: Vec<f64> },
}

/// A complete synthetic multi-site world.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    labels: Alphabet,
    sites: Alphabet,
    observations: Alphabet,
    coupling: Coupling,
    scanners: Vec<ScannerModel>,
}

fn check_probs(probs: &[f64], expected_len: usize, what: &str) -> Result<()> {
    if probs.len() != expected_len {
        return Err(Error::Validation(format!(
            "{what} has {} entries, expected {expected_len}",
            probs.len()
        )));
    }
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::Validation(format!("{what} has invalid entry {bad}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > RAW_SUM_TOLERANCE {
        return Err(Error::Validation(format!("{what} sums to {total}, expected 1")));
    }
    Ok(())
}

impl Scenario {
    /// Validates and assembles a scenario.
    ///
    /// Every site with positive mass needs exactly one scanner; sites with
    /// zero mass may omit theirs. The observation alphabet is the smallest
    /// one that every scanner fits into.
    pub fn new(labels: Alphabet, sites: Alphabet, coupling: Coupling, mut scanners: Vec<ScannerModel>) -> Result<Self> {
        let (ny, ns) = (labels.size(), sites.size());
        match &coupling {
            Coupling::Independent {
                label_prior,
                site_prior,
            } => {
                check_probs(label_prior, ny, "label prior")?;
                check_probs(site_prior, ns, "site prior")?;
            }
            Coupling::Joint { table } => check_probs(table, ny * ns, "label-site joint")?,
        }

        scanners.sort_by_key(|m| m.site);
        for (i, model) in scanners.iter().enumerate() {
            if model.site >= ns {
                return Err(Error::Validation(format!(
                    "scanner for unknown site index {}",
                    model.site
                )));
            }
            if i > 0 && scanners[i - 1].site == model.site {
                return Err(Error::Validation(format!(
                    "site `{}` has more than one scanner",
                    sites.label(model.site)
                )));
            }
        }

        let mut x_size = 1;
        for model in &scanners {
            let site = sites.label(model.site);
            match &model.kind {
                ScannerKind::Bsc { epsilon } => {
                    if ny != 2 {
                        return Err(Error::Validation(format!(
                            "bsc scanner at site `{site}` needs binary labels, got {ny}"
                        )));
                    }
                    if !(0.0..=1.0).contains(epsilon) {
                        return Err(Error::Validation(format!(
                            "bsc scanner at site `{site}` has epsilon {epsilon} outside [0, 1]"
                        )));
                    }
                }
                ScannerKind::Erasure { delta } => {
                    if !(0.0..=1.0).contains(delta) {
                        return Err(Error::Validation(format!(
                            "erasure scanner at site `{site}` has delta {delta} outside [0, 1]"
                        )));
                    }
                }
                ScannerKind::Explicit { x_size, rows } => {
                    if *x_size == 0 || rows.len() != ny * x_size {
                        return Err(Error::Validation(format!(
                            "explicit scanner at site `{site}` needs {ny} rows of {x_size} entries, got {} entries",
                            rows.len()
                        )));
                    }
                    for (y, row) in rows.chunks_exact(*x_size).enumerate() {
                        check_probs(row, *x_size, &format!("scanner `{site}` row {y}"))?;
                    }
                }
            }
            x_size = x_size.max(model.kind.observation_size(ny));
        }
        for model in &scanners {
            if matches!(model.kind, ScannerKind::Erasure { .. }) && x_size != ny + 1 {
                return Err(Error::Validation(format!(
                    "erasure scanner at site `{}` needs exactly {} observation symbols, other scanners need {x_size}",
                    sites.label(model.site),
                    ny + 1
                )));
            }
        }

        let scenario = Self {
            observations: Alphabet::new("x", x_size)?,
            labels,
            sites,
            coupling,
            scanners,
        };
        let site_mass = scenario.site_mass();
        for (s, &mass) in site_mass.iter().enumerate() {
            if mass > 0.0 && scenario.scanner(s).is_none() {
                return Err(Error::Validation(format!(
                    "missing scanner for site `{}`",
                    scenario.sites.label(s)
                )));
            }
        }
        Ok(scenario)
    }

    pub fn labels(&self) -> &Alphabet {
        &self.labels
    }

    pub fn sites(&self) -> &Alphabet {
        &self.sites
    }

    pub fn observations(&self) -> &Alphabet {
        &self.observations
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    /// Scanners ordered by site index.
    pub fn scanners(&self) -> &[ScannerModel] {
        &self.scanners
    }

    pub fn scanner(&self, site: usize) -> Option<&ScannerModel> {
        self.scanners.iter().find(|m| m.site == site)
    }

    /// Row-major `|Y| x |S|` table of `p(y, s)` as declared (not renormalized).
    pub fn label_site_table(&self) -> Vec<f64> {
        match &self.coupling {
            Coupling::Independent {
                label_prior,
                site_prior,
            } => label_prior
                .iter()
                .flat_map(|py| site_prior.iter().map(move |ps| py * ps))
                .collect(),
            Coupling::Joint { table } => table.clone(),
        }
    }

    fn site_mass(&self) -> Vec<f64> {
        let ns = self.sites.size();
        let mut mass = vec![0.0; ns];
        for (i, p) in self.label_site_table().iter().enumerate() {
            mass[i % ns] += p;
        }
        mass
    }

    /// The scanner at `site` as a channel from labels to observations.
    pub fn scanner_channel(&self, site: usize) -> Result<Channel> {
        let model = self
            .scanner(site)
            .ok_or_else(|| Error::Construction(format!("missing scanner for site `{}`", self.sites.label(site))))?;
        let (ny, nx) = (self.labels.size(), self.observations.size());
        let mut rows = vec![0.0; ny * nx];
        match &model.kind {
            ScannerKind::Bsc { epsilon } => {
                for y in 0..2 {
                    rows[y * nx + y] = 1.0 - epsilon;
                    rows[y * nx + (1 - y)] = *epsilon;
                }
            }
            ScannerKind::Erasure { delta } => {
                for y in 0..ny {
                    rows[y * nx + y] = 1.0 - delta;
                    rows[y * nx + ny] = *delta;
                }
            }
            ScannerKind::Explicit { x_size, rows: table } => {
                for y in 0..ny {
                    rows[y * nx..y * nx + x_size].copy_from_slice(&table[y * x_size..(y + 1) * x_size]);
                }
            }
        }
        Channel::new(self.labels.renamed("y"), self.observations.clone(), rows)
    }
}

/// Materializes `p(y, s, x) = p(y, s) p(x | y, s)` over axes `(Y, S, X)`.
pub fn build_joint(scenario: &Scenario) -> Result<JointDistribution> {
    let (ny, ns, nx) = (
        scenario.labels.size(),
        scenario.sites.size(),
        scenario.observations.size(),
    );
    let ys = scenario.label_site_table();
    let total: f64 = ys.iter().sum();
    let mut channels = Vec::with_capacity(ns);
    for s in 0..ns {
        let has_mass = (0..ny).any(|y| ys[y * ns + s] > 0.0);
        channels.push(if has_mass {
            Some(scenario.scanner_channel(s)?)
        } else {
            None
        });
    }
    let mut mass = vec![0.0; ny * ns * nx];
    for y in 0..ny {
        for (s, channel) in channels.iter().enumerate() {
            let p = ys[y * ns + s] / total;
            if p == 0.0 {
                continue;
            }
            let channel = channel.as_ref().expect("positive-mass site has a scanner");
            let base = (y * ns + s) * nx;
            for (cell, q) in mass[base..base + nx].iter_mut().zip(channel.row(y)) {
                *cell = p * q;
            }
        }
    }
    JointDistribution::new(
        vec![
            scenario.labels.renamed("y"),
            scenario.sites.renamed("s"),
            scenario.observations.clone(),
        ],
        mass,
    )
}
