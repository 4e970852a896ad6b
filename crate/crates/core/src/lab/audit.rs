//! Audits of the two invariance results: the least-informative-site bound
//! and the site-exclusive-label impossibility.

use alloc::format;
use alloc::vec::Vec;

use super::{evaluate_encoder, Encoder};
use crate::prob::JointDistribution;
use crate::scenario::site_exclusive_labels;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    HypothesisNotMet,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Tolerances {
    /// Bits of `I(s, y)` and `I(z, s)` still counted as zero.
    pub hypothesis: f64,
    /// Negative slack tolerated before calling the bound violated.
    pub slack: f64,
}

impl Default for Prop1Tolerances {
    fn default() -> Self {
        Self {
            hypothesis: 1e-9,
            slack: 1e-7,
        }
    }
}

/// Check of `I(y, z) <= min_s I(y, x | s)` for one encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Report {
    /// `I(y, z)`.
    pub lhs: f64,
    /// `min_s I(y, x | s)`.
    pub rhs: f64,
    /// Site attaining `rhs`.
    pub rhs_site: usize,
    /// `rhs - lhs`.
    pub slack: f64,
    pub hypothesis_i_s_y: f64,
    pub hypothesis_i_z_s: f64,
    pub hypothesis_satisfied: bool,
    /// `max_s |I(y, z | s) - I(y, z)|`; zero whenever the per-site
    /// information of the representation does not depend on the site.
    pub identity_deviation: f64,
    pub per_site_i_y_z: Vec<(usize, f64)>,
    pub verdict: Verdict,
}

pub fn check_prop1(joint: &JointDistribution, encoder: &Encoder, tolerances: Prop1Tolerances) -> Result<Prop1Report> {
    let report = evaluate_encoder(joint, encoder)?;
    let (rhs_site, rhs) = report
        .per_site_i_y_x
        .iter()
        .copied()
        .fold(None, |best: Option<(usize, f64)>, (s, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((s, v)),
        })
        .ok_or_else(|| Error::Usage("no site carries positive mass".into()))?;
    let lhs = report.i_y_z;
    let slack = rhs - lhs;
    let identity_deviation = report
        .per_site_i_y_z
        .iter()
        .map(|(_, v)| (v - lhs).abs())
        .fold(0.0, f64::max);
    let hypothesis_satisfied = report.i_s_y <= tolerances.hypothesis && report.i_z_s <= tolerances.hypothesis;
    let verdict = if !hypothesis_satisfied {
        Verdict::HypothesisNotMet
    } else if slack < -tolerances.slack {
        Verdict::Violated
    } else {
        Verdict::Holds
    };
    Ok(Prop1Report {
        lhs,
        rhs,
        rhs_site,
        slack,
        hypothesis_i_s_y: report.i_s_y,
        hypothesis_i_z_s: report.i_z_s,
        hypothesis_satisfied,
        identity_deviation,
        per_site_i_y_z: report.per_site_i_y_z,
        verdict,
    })
}

/// How a predictor treats a label that only occurs at one site.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Report {
    pub exclusive_label: usize,
    pub home_site: usize,
    /// `p(yhat = label | y = label, s = home)`.
    pub recall_at_home: f64,
    /// `p(yhat = label | s != home)`; every such prediction is an error.
    pub false_positive_rate_elsewhere: f64,
    /// `max |p(yhat = label | s) - p(yhat = label | s')|` over sites with mass.
    pub rate_gap: f64,
    /// `p(yhat = label | s)` per site with mass.
    pub per_site_rate: Vec<(usize, f64)>,
    pub i_z_s: f64,
}

pub fn check_prop2(
    joint: &JointDistribution,
    encoder: &Encoder,
    exclusive_label: usize,
    home_site: usize,
) -> Result<Prop2Report> {
    let support = site_exclusive_labels(joint)?;
    let label = support
        .get(exclusive_label)
        .ok_or_else(|| Error::Usage(format!("label {exclusive_label} out of range")))?;
    if label.sites != [home_site] {
        return Err(Error::Usage(format!(
            "label {exclusive_label} is observed at sites {:?}, not only at site {home_site}",
            label.sites
        )));
    }
    let report = evaluate_encoder(joint, encoder)?;
    let decision = &report.predictor.decision;

    let ysxz = crate::prob::push_through_channel(
        joint,
        crate::scenario::X_AXIS,
        encoder.channel(),
        crate::prob::PushMode::Append,
    )?;
    let ysz = ysxz.marginalize(&[0, 1, 3])?;
    let (ns, nz) = (ysz.axis(1).size(), ysz.axis(2).size());
    let hits = |y: usize, s: usize| -> f64 {
        (0..nz)
            .filter(|&z| decision[z] == exclusive_label)
            .fold(0.0, |acc, z| acc + ysz.get(&[y, s, z]))
    };
    let mass = |y: usize, s: usize| -> f64 { (0..nz).fold(0.0, |acc, z| acc + ysz.get(&[y, s, z])) };

    let recall_at_home = hits(exclusive_label, home_site) / mass(exclusive_label, home_site);

    let per_site_rate: Vec<(usize, f64)> = report
        .prediction_rates
        .iter()
        .map(|r| (r.site, r.rates[exclusive_label]))
        .collect();
    let (mut elsewhere_hits, mut elsewhere_mass) = (0.0, 0.0);
    let ny = ysz.axis(0).size();
    for s in (0..ns).filter(|&s| s != home_site) {
        for y in 0..ny {
            elsewhere_hits += hits(y, s);
            elsewhere_mass += mass(y, s);
        }
    }
    let false_positive_rate_elsewhere = if elsewhere_mass > 0.0 {
        (elsewhere_hits / elsewhere_mass).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (lo, hi) = per_site_rate
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, r)| {
            (lo.min(*r), hi.max(*r))
        });

    Ok(Prop2Report {
        exclusive_label,
        home_site,
        recall_at_home: recall_at_home.clamp(0.0, 1.0),
        false_positive_rate_elsewhere,
        rate_gap: hi - lo,
        per_site_rate,
        i_z_s: report.i_z_s,
    })
}
