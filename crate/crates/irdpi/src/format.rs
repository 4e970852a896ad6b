//! Plain-text scenario and encoder files.
//!
//! ```text
//! [labels]            # "size = k" (uniform prior) or "prior = p0,p1,..."
//! size = 2
//! [sites]
//! names = A,B
//! prior = 0.5,0.5     # omit and provide [coupling] for correlated y,s
//! [coupling]          # optional; row-major p(y,s), overrides priors
//! joint = 0.25,0.25, 0.25,0.25
//! [scanner.A]
//! kind = bsc
//! epsilon = 0.1
//! [scanner.B]
//! kind = explicit
//! x_size = 3
//! rows = 0.9,0.1,0.0, 0.1,0.9,0.0   # row-major p(x|y, s=B)
//! ```
//!
//! `#` starts a comment. Keys are exact; unknown keys and sections are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use irdpi_core::lab::Encoder;
use irdpi_core::prob::Alphabet;
use irdpi_core::scenario::{Coupling, ScannerKind, ScannerModel, Scenario};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Semantic(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

#[derive(Debug)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn check_keys(&self, name: &str, allowed: &[&str]) -> Result<(), FormatError> {
        for (key, entry) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(parse_err(entry.line, format!("unknown key `{key}` in [{name}]")));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }
}

/// Splits text into named sections, keeping their order of appearance.
fn sections(text: &str) -> Result<Vec<(String, Section)>, FormatError> {
    let mut out: Vec<(String, Section)> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "section header is missing `]`"))?
                .trim();
            if name.is_empty() {
                return Err(parse_err(line, "empty section name"));
            }
            if out.iter().any(|(n, _)| n == name) {
                return Err(parse_err(line, format!("duplicate section [{name}]")));
            }
            out.push((
                name.to_string(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            ));
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, found `{content}`")))?;
        let key = key.trim();
        let (_, section) = out
            .last_mut()
            .ok_or_else(|| parse_err(line, format!("key `{key}` appears before any section")))?;
        if section.entries.contains_key(key) {
            return Err(parse_err(line, format!("duplicate key `{key}`")));
        }
        section.entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(out)
}

fn parse_number<T: std::str::FromStr>(entry: &Entry, key: &str) -> Result<T, FormatError> {
    entry
        .value
        .parse()
        .map_err(|_| parse_err(entry.line, format!("`{key}` expects a number, found `{}`", entry.value)))
}

fn parse_list(entry: &Entry, key: &str) -> Result<Vec<f64>, FormatError> {
    entry
        .value
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .map_err(|_| parse_err(entry.line, format!("`{key}` has a non-numeric entry `{v}`")))
        })
        .collect()
}

fn parse_names(entry: &Entry) -> Result<Vec<String>, FormatError> {
    let names: Vec<String> = entry.value.split(',').map(|n| n.trim().to_string()).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(parse_err(entry.line, "`names` has an empty entry"));
    }
    Ok(names)
}

fn semantic(err: irdpi_core::Error) -> FormatError {
    FormatError::Semantic(err.to_string())
}

/// Alphabet plus optional prior from a `[labels]` or `[sites]` section.
fn alphabet_section(name: &str, axis: &str, section: &Section) -> Result<(Alphabet, Option<Vec<f64>>), FormatError> {
    section.check_keys(name, &["size", "names", "prior"])?;
    let names = section.get("names").map(parse_names).transpose()?;
    let prior = section.get("prior").map(|e| parse_list(e, "prior")).transpose()?;
    let size: Option<usize> = section.get("size").map(|e| parse_number(e, "size")).transpose()?;
    let inferred = names.as_ref().map(Vec::len).or(prior.as_ref().map(Vec::len)).or(size);
    let Some(n) = inferred else {
        return Err(parse_err(
            section.line,
            format!("[{name}] needs `size`, `names` or `prior`"),
        ));
    };
    for (key, len) in [
        ("size", size),
        ("names", names.as_ref().map(Vec::len)),
        ("prior", prior.as_ref().map(Vec::len)),
    ] {
        if let Some(len) = len {
            if len != n {
                let line = section.get(key).map_or(section.line, |e| e.line);
                return Err(parse_err(
                    line,
                    format!("[{name}] `{key}` implies {len} symbols, expected {n}"),
                ));
            }
        }
    }
    let alphabet = match names {
        Some(names) => Alphabet::with_labels(axis, names),
        None => Alphabet::new(axis, n),
    }
    .map_err(|e| parse_err(section.line, e.to_string()))?;
    Ok((alphabet, prior))
}

fn scanner_section(site: &str, section: &Section, sites: &Alphabet) -> Result<ScannerModel, FormatError> {
    let name = format!("scanner.{site}");
    let index = sites
        .position(site)
        .ok_or_else(|| parse_err(section.line, format!("[{name}] refers to unknown site `{site}`")))?;
    let kind_entry = section
        .get("kind")
        .ok_or_else(|| parse_err(section.line, format!("[{name}] needs `kind`")))?;
    let kind = match kind_entry.value.as_str() {
        "bsc" => {
            section.check_keys(&name, &["kind", "epsilon"])?;
            let e = section
                .get("epsilon")
                .ok_or_else(|| parse_err(section.line, format!("[{name}] needs `epsilon`")))?;
            ScannerKind::Bsc {
                epsilon: parse_number(e, "epsilon")?,
            }
        }
        "erasure" => {
            section.check_keys(&name, &["kind", "delta"])?;
            let e = section
                .get("delta")
                .ok_or_else(|| parse_err(section.line, format!("[{name}] needs `delta`")))?;
            ScannerKind::Erasure {
                delta: parse_number(e, "delta")?,
            }
        }
        "explicit" => {
            section.check_keys(&name, &["kind", "x_size", "rows"])?;
            let size = section
                .get("x_size")
                .ok_or_else(|| parse_err(section.line, format!("[{name}] needs `x_size`")))?;
            let rows = section
                .get("rows")
                .ok_or_else(|| parse_err(section.line, format!("[{name}] needs `rows`")))?;
            ScannerKind::Explicit {
                x_size: parse_number(size, "x_size")?,
                rows: parse_list(rows, "rows")?,
            }
        }
        other => {
            return Err(parse_err(
                kind_entry.line,
                format!("unknown scanner kind `{other}` (expected bsc, erasure or explicit)"),
            ))
        }
    };
    Ok(ScannerModel::new(index, kind))
}

/// Parses a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, FormatError> {
    let sections = sections(text)?;
    let mut labels = None;
    let mut sites = None;
    let mut coupling = None;
    let mut scanner_sections = Vec::new();
    for (name, section) in &sections {
        match name.as_str() {
            "labels" => labels = Some(alphabet_section("labels", "y", section)?),
            "sites" => sites = Some(alphabet_section("sites", "s", section)?),
            "coupling" => {
                section.check_keys("coupling", &["joint"])?;
                let joint = section
                    .get("joint")
                    .ok_or_else(|| parse_err(section.line, "[coupling] needs `joint`"))?;
                coupling = Some(parse_list(joint, "joint")?);
            }
            other => match other.strip_prefix("scanner.") {
                Some(site) if !site.is_empty() => scanner_sections.push((site.to_string(), section)),
                _ => return Err(parse_err(section.line, format!("unknown section [{other}]"))),
            },
        }
    }
    let (labels, label_prior) = labels.ok_or_else(|| FormatError::Semantic("missing [labels] section".into()))?;
    let (sites, site_prior) = sites.ok_or_else(|| FormatError::Semantic("missing [sites] section".into()))?;

    let coupling = match coupling {
        Some(table) => Coupling::Joint { table },
        None => Coupling::Independent {
            label_prior: label_prior.unwrap_or_else(|| vec![1.0 / labels.size() as f64; labels.size()]),
            site_prior: site_prior.ok_or_else(|| {
                FormatError::Semantic("[sites] needs `prior` unless a [coupling] joint is given".into())
            })?,
        },
    };

    let scanners = scanner_sections
        .into_iter()
        .map(|(site, section)| scanner_section(&site, section, &sites))
        .collect::<Result<Vec<_>, _>>()?;
    Scenario::new(labels, sites, coupling, scanners).map_err(semantic)
}

fn join(values: &[f64], group: usize) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(if group > 0 && i % group == 0 { ", " } else { "," });
        }
        // shortest representation that parses back to the same bits
        write!(out, "{v:?}").expect("writing to a string");
    }
    out
}

fn write_alphabet(out: &mut String, alphabet: &Alphabet, prior: Option<&[f64]>) {
    match alphabet.labels() {
        Some(names) => writeln!(out, "names = {}", names.join(",")),
        None => writeln!(out, "size = {}", alphabet.size()),
    }
    .expect("writing to a string");
    // a missing prior parses as exactly 1/k per symbol
    let uniform = 1.0 / alphabet.size() as f64;
    if let Some(prior) = prior.filter(|p| p.iter().any(|&v| v != uniform)) {
        writeln!(out, "prior = {}", join(prior, 0)).expect("writing to a string");
    }
}

/// Writes a scenario so that [`parse_scenario`] reproduces it exactly.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let mut out = String::new();
    let (label_prior, site_prior) = match scenario.coupling() {
        Coupling::Independent {
            label_prior,
            site_prior,
        } => (Some(label_prior.as_slice()), Some(site_prior.as_slice())),
        Coupling::Joint { .. } => (None, None),
    };
    out.push_str("[labels]\n");
    write_alphabet(&mut out, scenario.labels(), label_prior);
    out.push_str("[sites]\n");
    write_alphabet(&mut out, scenario.sites(), None);
    if let Some(prior) = site_prior {
        // the site prior is mandatory without a coupling table
        writeln!(out, "prior = {}", join(prior, 0)).expect("writing to a string");
    }
    if let Coupling::Joint { table } = scenario.coupling() {
        writeln!(out, "[coupling]\njoint = {}", join(table, scenario.sites().size())).expect("writing to a string");
    }
    for model in scenario.scanners() {
        writeln!(out, "[scanner.{}]", scenario.sites().label(model.site)).expect("writing to a string");
        match &model.kind {
            ScannerKind::Bsc { epsilon } => writeln!(out, "kind = bsc\nepsilon = {epsilon:?}"),
            ScannerKind::Erasure { delta } => writeln!(out, "kind = erasure\ndelta = {delta:?}"),
            ScannerKind::Explicit { x_size, rows } => {
                writeln!(
                    out,
                    "kind = explicit\nx_size = {x_size}\nrows = {}",
                    join(rows, *x_size)
                )
            }
        }
        .expect("writing to a string");
    }
    out
}

/// Parses an encoder file for a scenario with observation alphabet `x`.
///
/// ```text
/// [encoder]
/// z_size = 2
/// rows = 1,0, 0,1     # row-major q(z|x), one row per observation symbol
/// ```
pub fn parse_encoder(text: &str, x: &Alphabet) -> Result<Encoder, FormatError> {
    let sections = sections(text)?;
    let [(name, section)] = sections.as_slice() else {
        return Err(FormatError::Semantic(
            "encoder file needs exactly one [encoder] section".into(),
        ));
    };
    if name != "encoder" {
        return Err(parse_err(section.line, format!("unknown section [{name}]")));
    }
    section.check_keys("encoder", &["z_size", "rows"])?;
    let z_size = section
        .get("z_size")
        .ok_or_else(|| parse_err(section.line, "[encoder] needs `z_size`"))
        .and_then(|e| parse_number::<usize>(e, "z_size"))?;
    let rows = section
        .get("rows")
        .ok_or_else(|| parse_err(section.line, "[encoder] needs `rows`"))
        .and_then(|e| parse_list(e, "rows"))?;
    Encoder::from_table(x, z_size, rows).map_err(semantic)
}

/// Writes an encoder in the format read by [`parse_encoder`].
pub fn serialize_encoder(encoder: &Encoder) -> String {
    format!(
        "[encoder]\nz_size = {}\nrows = {}\n",
        encoder.z_size(),
        join(encoder.channel().table(), encoder.z_size())
    )
}
