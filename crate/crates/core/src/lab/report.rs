use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{bayes_predictor, Encoder, Predictor, Z_AXIS};
use crate::prob::{
    conditional_mutual_information, mutual_information, push_through_channel, JointDistribution, PushMode,
};
use crate::scenario::{S_AXIS, X_AXIS, Y_AXIS};
use crate::{Error, Result};

/// Prediction distribution `p(yhat | s)` at one site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteRates {
    pub site: usize,
    pub rates: Vec<f64>,
}

/// Every audited quantity for a `(joint, encoder)` pair, in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationReport {
    pub i_y_z: f64,
    pub i_z_s: f64,
    pub i_s_y: f64,
    pub i_y_yhat: f64,
    pub i_yhat_s: f64,
    /// `I(y, z | s = site)` for sites with positive mass.
    pub per_site_i_y_z: Vec<(usize, f64)>,
    /// `I(y, x | s = site)` for sites with positive mass.
    pub per_site_i_y_x: Vec<(usize, f64)>,
    /// Zero-mass sites, absent from the per-site tables.
    pub skipped_sites: Vec<usize>,
    /// 0-1 error probability of the Bayes predictor on `z`.
    pub risk: f64,
    pub predictor: Predictor,
    pub prediction_rates: Vec<SiteRates>,
}

fn positive_entries(values: &[Option<f64>]) -> Vec<(usize, f64)> {
    values
        .iter()
        .enumerate()
        .filter_map(|(s, v)| v.map(|v| (s, v)))
        .collect()
}

fn check_joint(joint: &JointDistribution, encoder: &Encoder) -> Result<()> {
    if joint.rank() != 3 {
        return Err(Error::Usage(format!(
            "expected a (Y, S, X) joint, got rank {}",
            joint.rank()
        )));
    }
    if !encoder.channel().input().compatible(joint.axis(X_AXIS)) {
        return Err(Error::Usage(format!(
            "encoder expects {} observation symbols, scenario has {}",
            encoder.channel().input().size(),
            joint.axis(X_AXIS).size()
        )));
    }
    Ok(())
}

/// `p(y, s, yhat)` from a `(Y, S, X, Z)` joint and a decision rule.
fn label_site_prediction(ysxz: &JointDistribution, predictor: &Predictor) -> Result<JointDistribution> {
    let ysz = ysxz.marginalize(&[Y_AXIS, S_AXIS, Z_AXIS])?;
    let (ny, ns, nz) = (ysz.axis(0).size(), ysz.axis(1).size(), ysz.axis(2).size());
    if predictor.decision.len() != nz || predictor.decision.iter().any(|&v| v >= ny) {
        return Err(Error::Usage("predictor must map every z to a label".into()));
    }
    let mut mass = vec![0.0; ny * ns * ny];
    for (cell, &p) in ysz.mass().iter().enumerate() {
        let (ys, z) = (cell / nz, cell % nz);
        mass[ys * ny + predictor.decision[z]] += p;
    }
    JointDistribution::new(
        vec![ysz.axis(0).clone(), ysz.axis(1).clone(), ysz.axis(0).renamed("yhat")],
        mass,
    )
}

fn rates_from(ys_yhat: &JointDistribution) -> Vec<SiteRates> {
    let s_yhat = ys_yhat.marginalize(&[1, 2]).expect("axes exist");
    let ny = s_yhat.axis(1).size();
    s_yhat
        .mass()
        .chunks_exact(ny)
        .enumerate()
        .filter_map(|(site, row)| {
            let total: f64 = row.iter().sum();
            (total > 0.0).then(|| SiteRates {
                site,
                rates: row.iter().map(|p| p / total).collect(),
            })
        })
        .collect()
}

/// `p(yhat | s)` for an arbitrary decision rule on the encoder output.
pub fn prediction_rates(joint: &JointDistribution, encoder: &Encoder, predictor: &Predictor) -> Result<Vec<SiteRates>> {
    check_joint(joint, encoder)?;
    let ysxz = push_through_channel(joint, X_AXIS, encoder.channel(), PushMode::Append)?;
    Ok(rates_from(&label_site_prediction(&ysxz, predictor)?))
}

/// Exact information report for `encoder` applied to a `(Y, S, X)` joint.
pub fn evaluate_encoder(joint: &JointDistribution, encoder: &Encoder) -> Result<InformationReport> {
    check_joint(joint, encoder)?;
    let ysxz = push_through_channel(joint, X_AXIS, encoder.channel(), PushMode::Append)?;
    let (predictor, risk) = bayes_predictor(&ysxz.marginalize(&[Y_AXIS, Z_AXIS])?)?;
    let ys_yhat = label_site_prediction(&ysxz, &predictor)?;

    let per_z = conditional_mutual_information(&ysxz, &[Y_AXIS], &[Z_AXIS], S_AXIS)?;
    let per_x = conditional_mutual_information(&ysxz, &[Y_AXIS], &[X_AXIS], S_AXIS)?;

    Ok(InformationReport {
        i_y_z: mutual_information(&ysxz, &[Y_AXIS], &[Z_AXIS])?,
        i_z_s: mutual_information(&ysxz, &[Z_AXIS], &[S_AXIS])?,
        i_s_y: mutual_information(&ysxz, &[S_AXIS], &[Y_AXIS])?,
        i_y_yhat: mutual_information(&ys_yhat, &[0], &[2])?,
        i_yhat_s: mutual_information(&ys_yhat, &[2], &[1])?,
        per_site_i_y_z: positive_entries(&per_z.per_value),
        per_site_i_y_x: positive_entries(&per_x.per_value),
        skipped_sites: per_x.skipped(),
        risk,
        prediction_rates: rates_from(&ys_yhat),
        predictor,
    })
}
