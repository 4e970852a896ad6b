use alloc::format;
use alloc::vec::Vec;

use crate::prob::{Alphabet, Channel, JointDistribution};
use crate::{Error, Result};

/// A representation `q(z | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    channel: Channel,
}

impl Encoder {
    pub fn new(channel: Channel) -> Self {
        Self { channel }
    }

    fn z(size: usize) -> Result<Alphabet> {
        Alphabet::new("z", size)
    }

    /// `z = x`.
    pub fn identity(x: &Alphabet) -> Self {
        let channel = Channel::identity(x.clone());
        let z = x.renamed("z");
        let map: Vec<usize> = (0..x.size()).collect();
        Self::new(Channel::deterministic(channel.input().clone(), z, &map).expect("identity map"))
    }

    /// Every `x` goes to `z = 0`.
    pub fn constant(x: &Alphabet, z_size: usize) -> Result<Self> {
        Ok(Self::new(Channel::constant(x.clone(), Self::z(z_size)?, 0)?))
    }

    /// `z = map[x]`.
    pub fn deterministic(x: &Alphabet, z_size: usize, map: &[usize]) -> Result<Self> {
        Ok(Self::new(Channel::deterministic(x.clone(), Self::z(z_size)?, map)?))
    }

    /// Stochastic encoder from a row-major `|X| x z_size` table.
    pub fn from_table(x: &Alphabet, z_size: usize, table: Vec<f64>) -> Result<Self> {
        Ok(Self::new(Channel::new(x.clone(), Self::z(z_size)?, table)?))
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn z_alphabet(&self) -> &Alphabet {
        self.channel.output()
    }

    pub fn z_size(&self) -> usize {
        self.channel.output().size()
    }
}

/// A deterministic decision rule `yhat = decision[z]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predictor {
    pub decision: Vec<usize>,
}

impl Predictor {
    pub fn predict(&self, z: usize) -> usize {
        self.decision[z]
    }
}

/// 0-1 optimal decision arm for a `(Y, Z)` joint and its risk.
///
/// `decision[z] = argmax_y p(y, z)`, lowest label on ties.
pub fn bayes_predictor(joint_yz: &JointDistribution) -> Result<(Predictor, f64)> {
    if joint_yz.rank() != 2 {
        return Err(Error::Usage(format!(
            "bayes predictor expects a (Y, Z) joint, got rank {}",
            joint_yz.rank()
        )));
    }
    let (ny, nz) = (joint_yz.axis(0).size(), joint_yz.axis(1).size());
    let mass = joint_yz.mass();
    let mut decision = Vec::with_capacity(nz);
    let mut correct = 0.0;
    for z in 0..nz {
        let (mut best, mut best_mass) = (0, mass[z]);
        for y in 1..ny {
            if mass[y * nz + z] > best_mass {
                best = y;
                best_mass = mass[y * nz + z];
            }
        }
        decision.push(best);
        correct += best_mass;
    }
    Ok((Predictor { decision }, (1.0 - correct).clamp(0.0, 1.0)))
}
