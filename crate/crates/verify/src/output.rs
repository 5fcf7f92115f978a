//! Report rendering: aligned text, JSON and one-row-per-suite CSV.

use kahler_core::models::{families, spec_by_id, DEFAULT_MODEL_IDS};
use kahler_core::report::{Expectation, Report, Status, SuiteReport};
use kahler_core::suites::SuiteId;
use serde::Serialize;
use std::fmt::Write as _;
use std::time::Duration;

fn expectation_label(e: Expectation) -> String {
    match e {
        Expectation::Below(t) => format!("<= {t:e}"),
        Expectation::AboveAll(t) => format!("> {t:e} all"),
        Expectation::AboveSome(t) => format!("> {t:e} some"),
        Expectation::Informational => "report".into(),
    }
}

/// Wall time appears only here, so the machine formats stay reproducible.
pub fn text(report: &Report, wall: Option<Duration>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model      {} ({})", report.model, report.description);
    let _ = writeln!(
        s,
        "sampling   seed {}, {} points, fd step {:e}, boundary margin {:e}",
        report.seed, report.points, report.fd_step, report.boundary_margin
    );
    let c = &report.conventions;
    let _ = writeln!(s, "convention {}; {}; {}; {}", c.omega, c.d_c, c.wedge, c.trace);
    let _ = writeln!(s);
    let width = report.suites.iter().flat_map(|r| r.checks.iter().map(|c| c.name.chars().count())).max().unwrap_or(10).max(10);
    let _ = writeln!(s, "{:<18} {:<width$} {:>10} {:>10} {:>10} {:>16}  status", "suite", "check", "max", "mean", "p95", "expect");
    for suite in &report.suites {
        suite_rows(&mut s, suite, width);
    }
    let _ = writeln!(s);
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    match wall {
        Some(w) => {
            let _ = writeln!(s, "result     {verdict} (wall time {:.2} s)", w.as_secs_f64());
        }
        None => {
            let _ = writeln!(s, "result     {verdict}");
        }
    }
    s
}

fn suite_rows(s: &mut String, suite: &SuiteReport, width: usize) {
    let header = match &suite.note {
        Some(n) => format!("{} ({n})", suite.status.as_str()),
        None => format!("{}, {} points", suite.status.as_str(), suite.points),
    };
    let _ = writeln!(s, "{:<18} {header}", suite.suite);
    for c in &suite.checks {
        let mark = match c.status {
            Status::Fail => "FAIL",
            Status::Pass => "ok",
            Status::Informational => "info",
            Status::Skipped => "skip",
        };
        let _ = write!(
            s,
            "{:<18} {:<width$} {:>10.3e} {:>10.3e} {:>10.3e} {:>16}  {mark}",
            "",
            c.name,
            c.stats.max,
            c.stats.mean,
            c.stats.p95,
            expectation_label(c.expectation)
        );
        if c.stats.nan > 0 {
            let _ = write!(s, " ({} NaN)", c.stats.nan);
        }
        if let Some(n) = &c.note {
            let _ = write!(s, "  [{n}]");
        }
        let _ = writeln!(s);
    }
}

pub fn json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CsvRow<'a> {
    model: &'a str,
    suite: &'a str,
    status: &'a str,
    points: usize,
    checks: usize,
    failed_checks: usize,
    /// Worst statistic over asserted upper-bound checks.
    max: f64,
    mean: f64,
    p95: f64,
    seed: u64,
}

pub fn csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for suite in &report.suites {
        let bounded: Vec<_> = suite.checks.iter().filter(|c| matches!(c.expectation, Expectation::Below(_))).collect();
        let worst = |f: fn(&kahler_core::report::Stats) -> f64| bounded.iter().map(|c| f(&c.stats)).fold(0.0, f64::max);
        w.serialize(CsvRow {
            model: &report.model,
            suite: &suite.suite,
            status: suite.status.as_str(),
            points: suite.points,
            checks: suite.checks.len(),
            failed_checks: suite.checks.iter().filter(|c| c.status == Status::Fail).count(),
            max: worst(|s| s.max),
            mean: worst(|s| s.mean),
            p95: worst(|s| s.p95),
            seed: report.seed,
        })
        .expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

#[derive(Serialize)]
struct FamilyEntry {
    id: &'static str,
    description: &'static str,
    params: &'static [&'static str],
}

#[derive(Serialize)]
struct ModelEntry {
    id: &'static str,
    family: &'static str,
    real_dim: usize,
    parameters: kahler_core::models::ModelSpec,
}

#[derive(Serialize)]
struct Catalog {
    families: Vec<FamilyEntry>,
    models: Vec<ModelEntry>,
}

fn catalog() -> Catalog {
    Catalog {
        families: families().into_iter().map(|(id, description, params)| FamilyEntry { id, description, params }).collect(),
        models: DEFAULT_MODEL_IDS
            .iter()
            .map(|&id| {
                let spec = spec_by_id(id).expect("catalog ids resolve");
                ModelEntry { id, family: spec.family(), real_dim: spec.dim(), parameters: spec }
            })
            .collect(),
    }
}

pub fn list_models_text() -> String {
    let cat = catalog();
    let mut s = String::from("families\n");
    for f in &cat.families {
        let _ = writeln!(s, "  {:<12} {}  [params: {}]", f.id, f.description, f.params.join(", "));
    }
    s.push_str("models\n");
    for m in &cat.models {
        let _ = writeln!(s, "  {:<16} {:<12} real dim {}", m.id, m.family, m.real_dim);
    }
    s
}

pub fn list_models_json() -> String {
    serde_json::to_string_pretty(&catalog()).expect("catalog serializes") + "\n"
}

#[derive(Serialize)]
struct SuiteEntry {
    id: &'static str,
    identity: &'static str,
}

fn suite_entries() -> Vec<SuiteEntry> {
    SuiteId::ALL.iter().map(|id| SuiteEntry { id: id.as_str(), identity: id.anchor() }).collect()
}

pub fn list_suites_text() -> String {
    let mut s = String::new();
    for e in suite_entries() {
        let _ = writeln!(s, "{:<18} -> {}", e.id, e.identity);
    }
    s
}

pub fn list_suites_json() -> String {
    serde_json::to_string_pretty(&suite_entries()).expect("suites serialize") + "\n"
}
