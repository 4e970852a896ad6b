//! Randomized stress test of the least-informative-site bound.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_prop1, enumerate_deterministic_optimum, Prop1Report, Prop1Tolerances, Verdict};
use crate::scenario::{
    build_joint, presets, random_scenario_with, RandomScenarioConfig, ScannerFamily, Scenario, ScenarioSizes,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub instances: usize,
    pub seed: u64,
    pub sizes: ScenarioSizes,
    /// Encoder output size; `None` means `|X|`.
    pub z_size: Option<usize>,
    pub invariance_tolerance: f64,
    pub slack_margin: f64,
    pub scanner_family: ScannerFamily,
    pub concentration: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            instances: 100,
            seed: 0,
            sizes: ScenarioSizes::new(2, 2, 3),
            z_size: None,
            invariance_tolerance: 1e-9,
            slack_margin: 1e-6,
            scanner_family: ScannerFamily::IndependentRandom,
            concentration: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub instance: usize,
    /// Instance 0 of a free-random search is the fixed two-site bsc probe.
    pub injected_probe: bool,
    pub scenario: Scenario,
    pub encoder_map: Vec<usize>,
    pub report: Prop1Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchCatalog {
    pub instances_run: usize,
    pub holds: usize,
    pub violated: usize,
    pub hypothesis_not_met: usize,
    /// Every instance whose verdict is not `holds`, plus the injected probe.
    pub entries: Vec<CatalogEntry>,
}

/// Scenario for instance `index`; always with independent labels and sites.
pub fn search_instance(config: &SearchConfig, index: usize) -> Result<(Scenario, bool)> {
    if index == 0 && config.scanner_family == ScannerFamily::FreeRandom {
        return Ok((presets::two_site_bsc(0.1, 0.4), true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let scenario_config = RandomScenarioConfig {
        sizes: config.sizes,
        independent: true,
        concentration: config.concentration,
        family: config.scanner_family,
    };
    Ok((random_scenario_with(&mut rng, &scenario_config)?, false))
}

/// For each random instance, audits the best deterministic encoder within
/// the invariance budget and catalogs every instance where the bound is not
/// confirmed.
pub fn counterexample_search(config: &SearchConfig) -> Result<SearchCatalog> {
    let tolerances = Prop1Tolerances {
        hypothesis: config.invariance_tolerance.max(Prop1Tolerances::default().hypothesis),
        slack: config.slack_margin,
    };
    let mut catalog = SearchCatalog {
        instances_run: 0,
        holds: 0,
        violated: 0,
        hypothesis_not_met: 0,
        entries: Vec::new(),
    };
    for index in 0..config.instances {
        let (scenario, injected_probe) = search_instance(config, index)?;
        let joint = build_joint(&scenario)?;
        let z_size = config.z_size.unwrap_or(scenario.observations().size());
        let optimum = enumerate_deterministic_optimum(&joint, z_size, config.invariance_tolerance)?;
        let report = check_prop1(&joint, &optimum.encoder, tolerances)?;
        catalog.instances_run += 1;
        match report.verdict {
            Verdict::Holds => catalog.holds += 1,
            Verdict::Violated => catalog.violated += 1,
            Verdict::HypothesisNotMet => catalog.hypothesis_not_met += 1,
        }
        if report.verdict != Verdict::Holds || injected_probe {
            catalog.entries.push(CatalogEntry {
                instance: index,
                injected_probe,
                scenario,
                encoder_map: optimum.map,
                report,
            });
        }
    }
    Ok(catalog)
}
