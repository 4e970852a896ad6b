//! JSON report documents and CSV tables.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which parses
//! back to the identical `f64`. Sites and labels are keyed by name.

use std::collections::BTreeMap;
use std::io::{self, Write};

use irdpi_core::lab::{
    CatalogEntry, Encoder, Frontier, InformationReport, Prop1Report, Prop2Report, SearchCatalog, TradeoffPoint,
};
use irdpi_core::prob::Alphabet;
use irdpi_core::scenario::SiteInformationProfile;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pretty JSON formatter that writes floats with 17 significant digits.
struct LosslessFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for LosslessFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as pretty JSON with lossless floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buffer = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, LosslessFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut serializer)
        .expect("report documents always serialize");
    buffer.push(b'\n');
    String::from_utf8(buffer).expect("serde_json emits UTF-8")
}

/// Formats a float for CSV cells with the same lossless convention as JSON.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Run metadata attached to every JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Metadata {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
        }
    }
}

/// A report document: metadata plus one payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle<P> {
    pub metadata: Metadata,
    pub payload: P,
}

/// Names used to key sites and labels in reports.
#[derive(Debug, Clone)]
pub struct Names {
    pub labels: Alphabet,
    pub sites: Alphabet,
}

impl Names {
    pub fn new(labels: &Alphabet, sites: &Alphabet) -> Self {
        Self {
            labels: labels.clone(),
            sites: sites.clone(),
        }
    }

    fn site(&self, s: usize) -> String {
        self.sites.label(s).into_owned()
    }

    fn label(&self, y: usize) -> String {
        self.labels.label(y).into_owned()
    }

    fn site_map(&self, values: &[(usize, f64)]) -> BTreeMap<String, f64> {
        values.iter().map(|&(s, v)| (self.site(s), v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderDoc {
    pub z_size: usize,
    /// Row-major `q(z | x)`.
    pub rows: Vec<Vec<f64>>,
}

impl EncoderDoc {
    pub fn new(encoder: &Encoder) -> Self {
        Self {
            z_size: encoder.z_size(),
            rows: encoder
                .channel()
                .table()
                .chunks(encoder.z_size())
                .map(<[f64]>::to_vec)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationDoc {
    pub i_y_z: f64,
    pub i_z_s: f64,
    pub i_s_y: f64,
    pub i_y_yhat: f64,
    pub i_yhat_s: f64,
    pub per_site_i_y_z: BTreeMap<String, f64>,
    pub per_site_i_y_x: BTreeMap<String, f64>,
    pub skipped_sites: Vec<String>,
    pub risk: f64,
    /// Label predicted for each representation symbol.
    pub predictor: Vec<String>,
    /// Per site, the probability of each predicted label.
    pub prediction_rates: BTreeMap<String, BTreeMap<String, f64>>,
}

impl InformationDoc {
    pub fn new(report: &InformationReport, names: &Names) -> Self {
        Self {
            i_y_z: report.i_y_z,
            i_z_s: report.i_z_s,
            i_s_y: report.i_s_y,
            i_y_yhat: report.i_y_yhat,
            i_yhat_s: report.i_yhat_s,
            per_site_i_y_z: names.site_map(&report.per_site_i_y_z),
            per_site_i_y_x: names.site_map(&report.per_site_i_y_x),
            skipped_sites: report.skipped_sites.iter().map(|&s| names.site(s)).collect(),
            risk: report.risk,
            predictor: report.predictor.decision.iter().map(|&y| names.label(y)).collect(),
            prediction_rates: report
                .prediction_rates
                .iter()
                .map(|r| {
                    let rates = r.rates.iter().enumerate().map(|(y, &p)| (names.label(y), p)).collect();
                    (names.site(r.site), rates)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteProfileDoc {
    /// `I(y, x | s = site)` for sites with positive mass.
    pub per_site: BTreeMap<String, f64>,
    pub skipped_sites: Vec<String>,
    pub minimum_site: String,
    pub minimum_value: f64,
    pub unconditional: f64,
    pub conditional_average: f64,
}

impl SiteProfileDoc {
    pub fn new(profile: &SiteInformationProfile, names: &Names) -> Self {
        Self {
            per_site: names.site_map(&profile.per_site),
            skipped_sites: profile.skipped_sites.iter().map(|&s| names.site(s)).collect(),
            minimum_site: names.site(profile.minimum_site),
            minimum_value: profile.minimum_value,
            unconditional: profile.unconditional,
            conditional_average: profile.conditional_average,
        }
    }
}

/// Payload of `info`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoDoc {
    pub encoder: EncoderDoc,
    pub information: InformationDoc,
    pub site_profile: SiteProfileDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffDoc {
    pub lambda: f64,
    pub objective_value: f64,
    pub converged: bool,
    pub restarts_used: usize,
    pub encoder: EncoderDoc,
    pub information: InformationDoc,
}

impl TradeoffDoc {
    pub fn new(point: &TradeoffPoint, names: &Names) -> Self {
        Self {
            lambda: point.lambda,
            objective_value: point.objective_value,
            converged: point.converged,
            restarts_used: point.restarts_used,
            encoder: EncoderDoc::new(&point.encoder),
            information: InformationDoc::new(&point.report, names),
        }
    }
}

/// Payload of `frontier`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierDoc {
    pub mode: String,
    pub points: Vec<TradeoffDoc>,
    /// Indices into `points`, ordered by decreasing `i_z_s`.
    pub pareto: Vec<usize>,
}

impl FrontierDoc {
    pub fn new(frontier: &Frontier, names: &Names) -> Self {
        Self {
            mode: frontier.mode.as_str().to_string(),
            points: frontier.points.iter().map(|p| TradeoffDoc::new(p, names)).collect(),
            pareto: frontier.pareto.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Doc {
    pub verdict: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_site: String,
    pub slack: f64,
    pub hypothesis_i_s_y: f64,
    pub hypothesis_i_z_s: f64,
    pub hypothesis_satisfied: bool,
    pub identity_deviation: f64,
    pub per_site_i_y_z: BTreeMap<String, f64>,
}

impl Prop1Doc {
    pub fn new(report: &Prop1Report, names: &Names) -> Self {
        Self {
            verdict: report.verdict.as_str().to_string(),
            lhs: report.lhs,
            rhs: report.rhs,
            rhs_site: names.site(report.rhs_site),
            slack: report.slack,
            hypothesis_i_s_y: report.hypothesis_i_s_y,
            hypothesis_i_z_s: report.hypothesis_i_z_s,
            hypothesis_satisfied: report.hypothesis_satisfied,
            identity_deviation: report.identity_deviation,
            per_site_i_y_z: names.site_map(&report.per_site_i_y_z),
        }
    }
}

/// Payload of `prop1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Payload {
    pub encoder: EncoderDoc,
    pub report: Prop1Doc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2Doc {
    pub exclusive_label: String,
    pub home_site: String,
    pub recall_at_home: f64,
    pub false_positive_rate_elsewhere: f64,
    pub rate_gap: f64,
    pub per_site_rate: BTreeMap<String, f64>,
    pub i_z_s: f64,
}

impl Prop2Doc {
    pub fn new(report: &Prop2Report, names: &Names) -> Self {
        Self {
            exclusive_label: names.label(report.exclusive_label),
            home_site: names.site(report.home_site),
            recall_at_home: report.recall_at_home,
            false_positive_rate_elsewhere: report.false_positive_rate_elsewhere,
            rate_gap: report.rate_gap,
            per_site_rate: names.site_map(&report.per_site_rate),
            i_z_s: report.i_z_s,
        }
    }
}

/// Payload of `prop2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2Payload {
    pub encoder: EncoderDoc,
    pub report: Prop2Doc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntryDoc {
    pub instance: usize,
    pub injected_probe: bool,
    /// The instance in scenario-file format.
    pub scenario: String,
    pub encoder_map: Vec<usize>,
    pub report: Prop1Doc,
}

impl CatalogEntryDoc {
    pub fn new(entry: &CatalogEntry) -> Self {
        let names = Names::new(entry.scenario.labels(), entry.scenario.sites());
        Self {
            instance: entry.instance,
            injected_probe: entry.injected_probe,
            scenario: crate::format::serialize_scenario(&entry.scenario),
            encoder_map: entry.encoder_map.clone(),
            report: Prop1Doc::new(&entry.report, &names),
        }
    }
}

/// Payload of `search`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogDoc {
    pub instances_run: usize,
    pub holds: usize,
    pub violated: usize,
    pub hypothesis_not_met: usize,
    pub entries: Vec<CatalogEntryDoc>,
}

impl CatalogDoc {
    pub fn new(catalog: &SearchCatalog) -> Self {
        Self {
            instances_run: catalog.instances_run,
            holds: catalog.holds,
            violated: catalog.violated,
            hypothesis_not_met: catalog.hypothesis_not_met,
            entries: catalog.entries.iter().map(CatalogEntryDoc::new).collect(),
        }
    }
}

pub const FRONTIER_HEADER: &str = "lambda,i_y_z_bits,i_z_s_bits,risk,converged,restarts_used";

fn frontier_row(out: &mut String, point: &TradeoffPoint) {
    out.push_str(&format!(
        "{},{},{},{},{},{}\n",
        format_float(point.lambda),
        format_float(point.report.i_y_z),
        format_float(point.report.i_z_s),
        format_float(point.report.risk),
        point.converged,
        point.restarts_used
    ));
}

/// Every sweep point, in grid order.
pub fn frontier_csv(frontier: &Frontier) -> String {
    let mut out = format!("{FRONTIER_HEADER}\n");
    for point in &frontier.points {
        frontier_row(&mut out, point);
    }
    out
}

/// The non-dominated sweep points, by decreasing `i_z_s`.
pub fn pareto_csv(frontier: &Frontier) -> String {
    let mut out = format!("{FRONTIER_HEADER}\n");
    for point in frontier.pareto_points() {
        frontier_row(&mut out, point);
    }
    out
}

pub const SUMMARY_HEADER: &str =
    "instance,injected_probe,lhs_bits,rhs_bits,rhs_site,slack_bits,i_s_y_bits,i_z_s_bits,identity_deviation_bits";

/// One row per catalog entry whose verdict is a violation.
pub fn summary_csv(catalog: &SearchCatalog) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for entry in &catalog.entries {
        let r = &entry.report;
        if r.verdict != irdpi_core::lab::Verdict::Violated {
            continue;
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            entry.instance,
            entry.injected_probe,
            format_float(r.lhs),
            format_float(r.rhs),
            entry.scenario.sites().label(r.rhs_site),
            format_float(r.slack),
            format_float(r.hypothesis_i_s_y),
            format_float(r.hypothesis_i_z_s),
            format_float(r.identity_deviation)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_lossless() {
        let values: [f64; 6] = [0.1, 1.0 / 3.0, 5e-324, 1.7976931348623157e308, -0.0, 0.5310044064107188];
        let json = to_json(&values);
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(json.contains("1.0000000000000001e-1"));
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_json(&f64::NAN).trim(), "null");
    }
}
