//! Seeded random scenarios for property tests and counterexample search.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::{Coupling, ScannerKind, ScannerModel, Scenario};
use crate::prob::Alphabet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioSizes {
    pub labels: usize,
    pub sites: usize,
    pub observations: usize,
}

impl ScenarioSizes {
    pub fn new(labels: usize, sites: usize, observations: usize) -> Self {
        Self {
            labels,
            sites,
            observations,
        }
    }
}

/// How scanner channels are drawn across sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScannerFamily {
    /// One random explicit channel shared by every site.
    Identical,
    /// An independent random explicit channel per site.
    IndependentRandom,
    /// Per site, a random choice among explicit, `bsc` and `erasure`
    /// scanners (parametric kinds only where the sizes allow them).
    FreeRandom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomScenarioConfig {
    pub sizes: ScenarioSizes,
    /// Draw `p(y)` and `p(s)` separately instead of a full `p(y, s)` table.
    pub independent: bool,
    /// Symmetric Dirichlet concentration for every random distribution.
    pub concentration: f64,
    pub family: ScannerFamily,
}

impl RandomScenarioConfig {
    pub fn new(sizes: ScenarioSizes) -> Self {
        Self {
            sizes,
            independent: true,
            concentration: 1.0,
            family: ScannerFamily::IndependentRandom,
        }
    }
}

fn dirichlet<R: Rng + ?Sized>(rng: &mut R, gamma: &Gamma<f64>, len: usize) -> Vec<f64> {
    let mut draw: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
    let total: f64 = draw.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        // every gamma draw underflowed: fall back to a random vertex
        draw.iter_mut().for_each(|p| *p = 0.0);
        draw[rng.random_range(0..len)] = 1.0;
        return draw;
    }
    draw.iter_mut().for_each(|p| *p /= total);
    draw
}

/// Random scenario with independent per-site explicit scanners.
pub fn random_scenario(seed: u64, sizes: ScenarioSizes, independent: bool, concentration: f64) -> Result<Scenario> {
    let config = RandomScenarioConfig {
        independent,
        concentration,
        ..RandomScenarioConfig::new(sizes)
    };
    random_scenario_with(&mut ChaCha8Rng::seed_from_u64(seed), &config)
}

/// Random scenario drawn from `rng`.
pub fn random_scenario_with<R: Rng + ?Sized>(rng: &mut R, config: &RandomScenarioConfig) -> Result<Scenario> {
    let ScenarioSizes {
        labels: ny,
        sites: ns,
        observations: nx,
    } = config.sizes;
    if ny == 0 || ns == 0 || nx == 0 {
        return Err(Error::Usage("random scenario sizes must all be at least 1".into()));
    }
    let gamma = Gamma::new(config.concentration, 1.0).map_err(|_| {
        Error::Domain(format!(
            "concentration {} must be positive and finite",
            config.concentration
        ))
    })?;

    let coupling = if config.independent {
        Coupling::Independent {
            label_prior: dirichlet(rng, &gamma, ny),
            site_prior: dirichlet(rng, &gamma, ns),
        }
    } else {
        Coupling::Joint {
            table: dirichlet(rng, &gamma, ny * ns),
        }
    };

    let explicit = |rng: &mut R| ScannerKind::Explicit {
        x_size: nx,
        rows: (0..ny).flat_map(|_| dirichlet(rng, &gamma, nx)).collect(),
    };
    let scanners = match config.family {
        ScannerFamily::Identical => {
            let kind = explicit(rng);
            (0..ns).map(|s| ScannerModel::new(s, kind.clone())).collect()
        }
        ScannerFamily::IndependentRandom => (0..ns).map(|s| ScannerModel::new(s, explicit(rng))).collect(),
        ScannerFamily::FreeRandom => {
            let bsc_ok = ny == 2 && nx == 2;
            let erasure_ok = nx == ny + 1;
            (0..ns)
                .map(|s| {
                    let kind = match rng.random_range(0..3u8) {
                        1 if bsc_ok => ScannerKind::Bsc {
                            epsilon: rng.random_range(0.0..=0.5),
                        },
                        2 if erasure_ok => ScannerKind::Erasure {
                            delta: rng.random_range(0.0..=1.0),
                        },
                        _ => explicit(rng),
                    };
                    ScannerModel::new(s, kind)
                })
                .collect()
        }
    };

    Scenario::new(Alphabet::new("y", ny)?, Alphabet::new("s", ns)?, coupling, scanners)
}
