//! Argument parsing and subcommand dispatch for the `irdpi` binary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use irdpi_core::lab::{
    check_prop1, check_prop2, counterexample_search, enumerate_deterministic_optimum, evaluate_encoder,
    lagrangian_optimize, lambda_grid, sweep_frontier, Encoder, ObjectiveMode, OptimizeOptions, Prop1Tolerances,
    SearchConfig, StepRule,
};
use irdpi_core::prob::JointDistribution;
use irdpi_core::scenario::{
    build_joint, per_site_information, site_exclusive_labels, ScannerFamily, Scenario, ScenarioSizes,
};
use serde::{Serialize, Serializer};

use crate::format::{parse_encoder, parse_scenario, FormatError};
use crate::report::{
    frontier_csv, pareto_csv, summary_csv, to_json, CatalogDoc, EncoderDoc, FrontierDoc, InfoDoc, InformationDoc,
    Metadata, Names, Prop1Doc, Prop1Payload, Prop2Doc, Prop2Payload, ReportBundle, SiteProfileDoc,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] irdpi_core::Error),
}

impl CliError {
    /// 1 for configuration and input problems, 2 for numerical-invariant
    /// failures, 3 for capacity limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(irdpi_core::Error::Numerical { .. }) => 2,
            CliError::Core(irdpi_core::Error::Capacity { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Information report for one scenario and encoder.
    Info,
    /// Sweep the invariance trade-off over a lambda grid.
    Frontier,
    /// Audit the worst-site bound for one scenario and encoder.
    Prop1,
    /// Audit prediction rates of a site-exclusive label.
    Prop2,
    /// Random search for instances that break the worst-site bound.
    Search,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Frontier => "frontier",
            Command::Prop1 => "prop1",
            Command::Prop2 => "prop2",
            Command::Search => "search",
        }
    }
}

/// Which encoder a single-encoder command audits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncoderSpec {
    Identity,
    Constant,
    /// Best deterministic map under the invariance tolerance.
    Enumerate,
    /// Lagrangian optimum at `--lambda`.
    Optimize,
    File(PathBuf),
}

impl FromStr for EncoderSpec {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "identity" => EncoderSpec::Identity,
            "constant" => EncoderSpec::Constant,
            "enumerate" => EncoderSpec::Enumerate,
            "optimize" => EncoderSpec::Optimize,
            path => EncoderSpec::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for EncoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncoderSpec::Identity => f.write_str("identity"),
            EncoderSpec::Constant => f.write_str("constant"),
            EncoderSpec::Enumerate => f.write_str("enumerate"),
            EncoderSpec::Optimize => f.write_str("optimize"),
            EncoderSpec::File(path) => write!(f, "{}", path.display()),
        }
    }
}

impl Serialize for EncoderSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Identical,
    IndependentRandom,
    FreeRandom,
}

impl From<FamilyArg> for ScannerFamily {
    fn from(value: FamilyArg) -> Self {
        match value {
            FamilyArg::Identical => ScannerFamily::Identical,
            FamilyArg::IndependentRandom => ScannerFamily::IndependentRandom,
            FamilyArg::FreeRandom => ScannerFamily::FreeRandom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Info,
    Risk,
}

impl From<ModeArg> for ObjectiveMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Info => ObjectiveMode::Info,
            ModeArg::Risk => ObjectiveMode::Risk,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "irdpi",
    version,
    about = "Exact information audits of site-invariant representations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (every command except `search`).
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// identity, constant, enumerate, optimize, or an encoder file.
    #[arg(long, global = true, value_name = "SPEC")]
    pub encoder: Option<EncoderSpec>,
    /// Representation alphabet size (defaults to the observation size).
    #[arg(long, global = true, value_name = "N")]
    pub z_size: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub lambda_min: f64,
    #[arg(long, global = true, default_value_t = 1e3)]
    pub lambda_max: f64,
    /// Log-spaced grid points; lambda = 0 is always prepended.
    #[arg(long, global = true, default_value_t = 33)]
    pub lambda_points: usize,
    /// Lambda used by `--encoder optimize`.
    #[arg(long, global = true, default_value_t = 1e3)]
    pub lambda: f64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Info)]
    pub mode: ModeArg,
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Ascent stops once an iteration gains less than this.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub instances: usize,
    #[arg(long, global = true, value_enum, default_value_t = FamilyArg::IndependentRandom)]
    pub scanner_family: FamilyArg,
    /// Label alphabet size for `search`.
    #[arg(long, global = true, default_value_t = 2)]
    pub y_size: usize,
    /// Site count for `search`.
    #[arg(long, global = true, default_value_t = 2)]
    pub s_size: usize,
    /// Observation alphabet size for `search`.
    #[arg(long, global = true, default_value_t = 3)]
    pub x_size: usize,
    /// Dirichlet concentration for `search` instances.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub concentration: f64,
    /// Largest I(z;s) (and I(s;y)) accepted as invariant.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub invariance_tolerance: f64,
    /// Slack below this negative margin is a violation [default: 1e-7, search 1e-6].
    #[arg(long, global = true)]
    pub slack_margin: Option<f64>,
    /// Site-exclusive label for `prop2`, by name or index (default: the first one).
    #[arg(long, global = true)]
    pub label: Option<String>,
    /// Home site of `--label`, by name or index (default: its only site).
    #[arg(long, global = true)]
    pub site: Option<String>,
    #[arg(long, global = true, value_name = "DIR", default_value = "irdpi-out")]
    pub out: PathBuf,
}

/// Everything a run depends on; echoed into every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoder_spec: Option<EncoderSpec>,
    pub z_size: Option<usize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub lambda: f64,
    pub mode: ModeArg,
    pub restarts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub instances: usize,
    pub scanner_family: FamilyArg,
    pub sizes: [usize; 3],
    pub concentration: f64,
    pub invariance_tolerance: f64,
    pub slack_margin: f64,
    pub label: Option<String>,
    pub site: Option<String>,
    /// Not echoed: reruns into another directory must produce identical files.
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Checks that the command has what it needs and nothing it would ignore.
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let command = cli.command;
        let needs_scenario = command != Command::Search;
        let takes_encoder = matches!(command, Command::Info | Command::Prop1 | Command::Prop2);
        match (&cli.scenario, needs_scenario) {
            (None, true) => return Err(CliError::Config(format!("`{}` needs --scenario", command.as_str()))),
            (Some(_), false) => {
                return Err(CliError::Config(
                    "`search` generates its own scenarios; drop --scenario".into(),
                ))
            }
            _ => {}
        }
        if cli.encoder.is_some() && !takes_encoder {
            return Err(CliError::Config(format!(
                "`{}` does not take --encoder",
                command.as_str()
            )));
        }
        if (cli.label.is_some() || cli.site.is_some()) && command != Command::Prop2 {
            return Err(CliError::Config("--label and --site only apply to `prop2`".into()));
        }
        for (name, value) in [
            ("--invariance-tolerance", cli.invariance_tolerance),
            ("--tolerance", cli.tolerance),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(CliError::Config(format!("{name} must be a finite non-negative number")));
            }
        }
        if cli.restarts == 0 {
            return Err(CliError::Config("--restarts must be at least 1".into()));
        }
        let default_slack = if command == Command::Search {
            SearchConfig::default().slack_margin
        } else {
            Prop1Tolerances::default().slack
        };
        Ok(Self {
            command,
            scenario_path: cli.scenario,
            encoder_spec: takes_encoder.then(|| cli.encoder.unwrap_or(EncoderSpec::Identity)),
            z_size: cli.z_size,
            lambda_min: cli.lambda_min,
            lambda_max: cli.lambda_max,
            lambda_points: cli.lambda_points,
            lambda: cli.lambda,
            mode: cli.mode,
            restarts: cli.restarts,
            max_iters: cli.max_iters,
            tolerance: cli.tolerance,
            seed: cli.seed,
            instances: cli.instances,
            scanner_family: cli.scanner_family,
            sizes: [cli.y_size, cli.s_size, cli.x_size],
            concentration: cli.concentration,
            invariance_tolerance: cli.invariance_tolerance,
            slack_margin: cli.slack_margin.unwrap_or(default_slack),
            label: cli.label,
            site: cli.site,
            output_dir: cli.out,
        })
    }

    fn optimize_options(&self) -> OptimizeOptions {
        OptimizeOptions {
            z_size: self.z_size,
            restarts: self.restarts,
            max_iters: self.max_iters,
            step_rule: StepRule::Backtracking,
            tolerance: self.tolerance,
            seed: self.seed,
        }
    }

    fn metadata(&self) -> Metadata {
        let config = serde_json::to_value(self).expect("run configuration serializes");
        Metadata::new(self.command.as_str(), self.seed, config)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_scenario(config: &RunConfig) -> Result<(Scenario, JointDistribution), CliError> {
    let path = config
        .scenario_path
        .as_deref()
        .expect("validated by RunConfig::from_cli");
    let scenario = parse_scenario(&read(path)?).map_err(|source| CliError::Format {
        path: path.display().to_string(),
        source,
    })?;
    let joint = build_joint(&scenario)?;
    Ok((scenario, joint))
}

fn resolve_encoder(config: &RunConfig, scenario: &Scenario, joint: &JointDistribution) -> Result<Encoder, CliError> {
    let x = scenario.observations();
    let spec = config.encoder_spec.as_ref().expect("validated by RunConfig::from_cli");
    Ok(match spec {
        EncoderSpec::Identity => {
            if let Some(z) = config.z_size.filter(|&z| z != x.size()) {
                return Err(CliError::Config(format!(
                    "the identity encoder needs --z-size {} (the observation size), got {z}",
                    x.size()
                )));
            }
            Encoder::identity(x)
        }
        EncoderSpec::Constant => Encoder::constant(x, config.z_size.unwrap_or(1))?,
        EncoderSpec::Enumerate => {
            let z = config.z_size.unwrap_or(x.size());
            enumerate_deterministic_optimum(joint, z, config.invariance_tolerance)?.encoder
        }
        EncoderSpec::Optimize => {
            lagrangian_optimize(joint, config.lambda, config.mode.into(), &config.optimize_options())?.encoder
        }
        EncoderSpec::File(path) => parse_encoder(&read(path)?, x).map_err(|source| CliError::Format {
            path: path.display().to_string(),
            source,
        })?,
    })
}

/// Resolves a `--label`/`--site` argument given by name or index.
fn lookup(alphabet: &irdpi_core::prob::Alphabet, value: &str, what: &str) -> Result<usize, CliError> {
    alphabet
        .position(value)
        .or_else(|| value.parse::<usize>().ok().filter(|&i| i < alphabet.size()))
        .ok_or_else(|| CliError::Config(format!("unknown {what} `{value}`")))
}

fn write_files(dir: &Path, files: Vec<(&str, String)>) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

fn document<P: Serialize>(metadata: &Metadata, payload: P) -> String {
    to_json(&ReportBundle {
        metadata: metadata.clone(),
        payload,
    })
}

/// Runs one command and returns the files it wrote.
pub fn dispatch(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let metadata = config.metadata();
    let files = match config.command {
        Command::Info => {
            let (scenario, joint) = load_scenario(config)?;
            let names = Names::new(scenario.labels(), scenario.sites());
            let encoder = resolve_encoder(config, &scenario, &joint)?;
            let report = evaluate_encoder(&joint, &encoder)?;
            let profile = per_site_information(&joint)?;
            let doc = InfoDoc {
                encoder: EncoderDoc::new(&encoder),
                information: InformationDoc::new(&report, &names),
                site_profile: SiteProfileDoc::new(&profile, &names),
            };
            vec![("report.json", document(&metadata, doc))]
        }
        Command::Frontier => {
            let (scenario, joint) = load_scenario(config)?;
            let names = Names::new(scenario.labels(), scenario.sites());
            let grid = lambda_grid(config.lambda_min, config.lambda_max, config.lambda_points)?;
            let frontier = sweep_frontier(&joint, &grid, config.mode.into(), &config.optimize_options())?;
            vec![
                ("frontier.csv", frontier_csv(&frontier)),
                ("pareto.csv", pareto_csv(&frontier)),
                ("report.json", document(&metadata, FrontierDoc::new(&frontier, &names))),
            ]
        }
        Command::Prop1 => {
            let (scenario, joint) = load_scenario(config)?;
            let names = Names::new(scenario.labels(), scenario.sites());
            let encoder = resolve_encoder(config, &scenario, &joint)?;
            let tolerances = Prop1Tolerances {
                hypothesis: config.invariance_tolerance,
                slack: config.slack_margin,
            };
            let report = check_prop1(&joint, &encoder, tolerances)?;
            let doc = Prop1Payload {
                encoder: EncoderDoc::new(&encoder),
                report: Prop1Doc::new(&report, &names),
            };
            vec![("prop1.json", document(&metadata, doc))]
        }
        Command::Prop2 => {
            let (scenario, joint) = load_scenario(config)?;
            let names = Names::new(scenario.labels(), scenario.sites());
            let support = site_exclusive_labels(&joint)?;
            let label = match &config.label {
                Some(value) => lookup(scenario.labels(), value, "label")?,
                None => support
                    .iter()
                    .find(|s| s.is_exclusive())
                    .map(|s| s.label)
                    .ok_or_else(|| CliError::Config("the scenario has no site-exclusive label".into()))?,
            };
            let site = match &config.site {
                Some(value) => lookup(scenario.sites(), value, "site")?,
                None => match support[label].sites.as_slice() {
                    [only] => *only,
                    _ => {
                        return Err(CliError::Config(format!(
                            "label `{}` is not exclusive to one site",
                            scenario.labels().label(label)
                        )))
                    }
                },
            };
            let encoder = resolve_encoder(config, &scenario, &joint)?;
            let report = check_prop2(&joint, &encoder, label, site)?;
            let doc = Prop2Payload {
                encoder: EncoderDoc::new(&encoder),
                report: Prop2Doc::new(&report, &names),
            };
            vec![("prop2.json", document(&metadata, doc))]
        }
        Command::Search => {
            let [labels, sites, observations] = config.sizes;
            let search = SearchConfig {
                instances: config.instances,
                seed: config.seed,
                sizes: ScenarioSizes::new(labels, sites, observations),
                z_size: config.z_size,
                invariance_tolerance: config.invariance_tolerance,
                slack_margin: config.slack_margin,
                scanner_family: config.scanner_family.into(),
                concentration: config.concentration,
            };
            let catalog = counterexample_search(&search)?;
            vec![
                ("catalog.json", document(&metadata, CatalogDoc::new(&catalog))),
                ("summary.csv", summary_csv(&catalog)),
            ]
        }
    };
    write_files(&config.output_dir, files)
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli).and_then(|config| dispatch(&config)) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
