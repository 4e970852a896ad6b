use std::path::Path;
use std::process::{Command, Output};

use irdpi::report::{to_json, CatalogDoc, FrontierDoc, InfoDoc, Prop1Payload, Prop2Payload, ReportBundle};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn irdpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irdpi"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str], out: &Path) {
    let mut full = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    let output = irdpi(&full);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}

/// Parses a report and checks that writing it again reproduces the file.
fn reparse<P: Serialize + DeserializeOwned>(path: &Path) -> ReportBundle<P> {
    let text = std::fs::read_to_string(path).unwrap();
    let bundle: ReportBundle<P> = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&bundle), text, "{} does not round-trip", path.display());
    bundle
}

#[test]
fn info_reports_per_site_information() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["info", "--scenario", "scenarios/two_site_bsc.scn"], dir.path());
    let bundle: ReportBundle<InfoDoc> = reparse(&dir.path().join("report.json"));
    let per_site = &bundle.payload.site_profile.per_site;
    assert!((per_site["A"] - 0.5310044).abs() < 1e-6);
    assert!((per_site["B"] - 0.0290494).abs() < 1e-6);
    assert_eq!(bundle.payload.site_profile.minimum_site, "B");
    assert!((bundle.payload.information.i_y_z - 0.1887219).abs() < 1e-6);
    assert_eq!(bundle.metadata.command, "info");
    assert_eq!(bundle.metadata.seed, 0);
    assert_eq!(bundle.metadata.config["encoder_spec"], "identity");
}

#[test]
fn frontier_is_deterministic_and_well_formed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        run_ok(
            &["frontier", "--scenario", "scenarios/site_exclusive.scn", "--seed", "3"],
            dir.path(),
        );
    }
    for file in ["frontier.csv", "pareto.csv", "report.json"] {
        let first = std::fs::read(a.path().join(file)).unwrap();
        assert_eq!(first, std::fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let csv = std::fs::read_to_string(a.path().join("frontier.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,i_y_z_bits,i_z_s_bits,risk,converged,restarts_used")
    );
    assert_eq!(lines.count(), 34);
    let bundle: ReportBundle<FrontierDoc> = reparse(&a.path().join("report.json"));
    assert_eq!(bundle.payload.points.len(), 34);
    let pareto = std::fs::read_to_string(a.path().join("pareto.csv")).unwrap();
    assert_eq!(pareto.lines().count(), bundle.payload.pareto.len() + 1);
}

#[test]
fn prop1_enumerate_holds_on_identical_scanners() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "prop1",
            "--scenario",
            "scenarios/identical_bsc.scn",
            "--encoder",
            "enumerate",
        ],
        dir.path(),
    );
    let bundle: ReportBundle<Prop1Payload> = reparse(&dir.path().join("prop1.json"));
    assert_eq!(bundle.payload.report.verdict, "holds");
    assert!(bundle.payload.report.slack >= 0.0);
}

#[test]
fn prop2_finds_the_exclusive_label() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["prop2", "--scenario", "scenarios/site_exclusive.scn"], dir.path());
    let bundle: ReportBundle<Prop2Payload> = reparse(&dir.path().join("prop2.json"));
    let report = &bundle.payload.report;
    assert_eq!((report.exclusive_label.as_str(), report.home_site.as_str()), ("2", "B"));
    assert_eq!(report.recall_at_home, 1.0);
    assert!(report.i_z_s > 0.01);

    run_ok(
        &[
            "prop2",
            "--scenario",
            "scenarios/site_exclusive.scn",
            "--encoder",
            "constant",
        ],
        dir.path(),
    );
    let bundle: ReportBundle<Prop2Payload> = reparse(&dir.path().join("prop2.json"));
    assert_eq!(bundle.payload.report.rate_gap, 0.0);
    assert_eq!(bundle.payload.report.recall_at_home.to_bits(), 0.0f64.to_bits());
}

#[test]
fn encoder_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let encoder = dir.path().join("merge.enc");
    std::fs::write(&encoder, "[encoder]\nz_size = 1\nrows = 1, 1\n").unwrap();
    run_ok(
        &[
            "prop1",
            "--scenario",
            "scenarios/two_site_bsc.scn",
            "--encoder",
            encoder.to_str().unwrap(),
        ],
        dir.path(),
    );
    let bundle: ReportBundle<Prop1Payload> = reparse(&dir.path().join("prop1.json"));
    assert_eq!(bundle.payload.report.lhs, 0.0);
    assert_eq!(bundle.payload.report.verdict, "holds");
}

#[test]
fn search_writes_catalog_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["search", "--instances", "20", "--scanner-family", "free-random"],
        dir.path(),
    );
    let bundle: ReportBundle<CatalogDoc> = reparse(&dir.path().join("catalog.json"));
    assert_eq!(bundle.payload.instances_run, 20);
    let probe = &bundle.payload.entries[0];
    assert!(probe.injected_probe);
    assert_eq!(probe.report.verdict, "violated");
    assert!(irdpi::format::parse_scenario(&probe.scenario).is_ok());
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), bundle.payload.violated + 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = |args: &[&str]| irdpi(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["info", "--bogus"]), 1);
    assert_eq!(code(&["info", "--out", out]), 1);
    assert_eq!(
        code(&[
            "frontier",
            "--scenario",
            "scenarios/two_site_bsc.scn",
            "--encoder",
            "identity",
            "--out",
            out
        ]),
        1
    );
    assert_eq!(
        code(&["search", "--scenario", "scenarios/two_site_bsc.scn", "--out", out]),
        1
    );
    assert_eq!(code(&["info", "--scenario", "missing.scn", "--out", out]), 1);

    let broken = dir.path().join("broken.scn");
    std::fs::write(
        &broken,
        "[labels]\nsize = 2\n[sites]\nnames = A\nprior = 1\ncolor = red\n",
    )
    .unwrap();
    let output = irdpi(&["info", "--scenario", broken.to_str().unwrap(), "--out", out]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 6") && stderr.contains("`color`"), "{stderr}");

    // 200^3 deterministic maps exceed the enumeration cap
    let args = [
        "prop1",
        "--scenario",
        "scenarios/site_exclusive.scn",
        "--encoder",
        "enumerate",
        "--z-size",
        "200",
    ];
    let mut full = args.to_vec();
    full.extend(["--out", out]);
    assert_eq!(code(&full), 3);
}

#[test]
fn numerical_failures_map_to_exit_two() {
    let err = irdpi::cli::CliError::Core(irdpi_core::Error::Numerical {
        quantity: "mutual information",
        value: -1e-6,
    });
    assert_eq!(err.exit_code(), 2);
    let err = irdpi::cli::CliError::Core(irdpi_core::Error::Capacity {
        what: "maps",
        requested: 10,
        limit: 1,
    });
    assert_eq!(err.exit_code(), 3);
    assert_eq!(irdpi::cli::CliError::Config("x".into()).exit_code(), 1);
}
