//! Report emission (CSV, JSON lines, human summary) and the JSON-lines loader.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use learnaug_core::{mean_stderr, Problem, RunRecord};

use crate::config::ReportFormat;
use crate::error::HarnessError;
use crate::suites::SuiteReport;

pub const CSV_HEADER: &str = "problem,pipeline,seed,objective,opt,switches,mistakes,ratio,regret,verdict";

fn meta<'a>(rec: &'a RunRecord, key: &str, default: &'a str) -> &'a str {
    rec.meta.get(key).map(String::as_str).unwrap_or(default)
}

/// One header line plus one row per record. Quantities are exact rationals;
/// `ratio` is empty when OPT is zero.
pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let ratio = r.ratio().map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            meta(r, "pipeline", ""),
            r.seed,
            r.objective,
            r.opt,
            r.switches,
            r.mistakes,
            ratio,
            r.regret(),
            meta(r, "verdict", "na"),
        );
    }
    out
}

pub fn to_jsonl(records: &[RunRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Parses JSON lines written by [`to_jsonl`]; blank lines are skipped.
pub fn load_jsonl(text: &str) -> Result<Vec<RunRecord>, HarnessError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| HarnessError::Config(format!("line {}: {e}", i + 1))))
        .collect()
}

#[derive(Default)]
struct Group {
    count: usize,
    ratios: Vec<f64>,
    regrets: Vec<f64>,
    switches: Vec<f64>,
    failed: usize,
}

/// Aggregates per (problem, pipeline, ℓ), then lists checks, notes and errors.
pub fn to_summary(report: &SuiteReport) -> String {
    let mut groups: BTreeMap<(Problem, String, String), Group> = BTreeMap::new();
    for r in &report.records {
        let g = groups
            .entry((r.problem, meta(r, "pipeline", "").to_string(), meta(r, "ell", "-").to_string()))
            .or_default();
        g.count += 1;
        if let Some(x) = r.ratio() {
            g.ratios.push(x.to_f64());
        }
        g.regrets.push(r.regret().to_f64());
        g.switches.push(r.switches as f64);
        g.failed += (meta(r, "verdict", "na") == "fail") as usize;
    }
    let mut out = String::new();
    let _ = writeln!(out, "suite {}: {} records", report.suite, report.records.len());
    let _ = writeln!(
        out,
        "{:<12} {:<28} {:>4} {:>6} {:>10} {:>10} {:>10} {:>10} {:>9} {:>6}",
        "problem", "pipeline", "ell", "runs", "ratio", "max ratio", "regret", "max regret", "switches", "failed"
    );
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for ((problem, pipeline, ell), g) in &groups {
        let ratio = if g.ratios.is_empty() {
            ("-".to_string(), "-".to_string())
        } else {
            (format!("{:.4}", mean_stderr(&g.ratios).0), format!("{:.4}", max(&g.ratios)))
        };
        let _ = writeln!(
            out,
            "{:<12} {:<28} {:>4} {:>6} {:>10} {:>10} {:>10.3} {:>10.3} {:>9.3} {:>6}",
            problem.to_string(),
            pipeline,
            ell,
            g.count,
            ratio.0,
            ratio.1,
            mean_stderr(&g.regrets).0,
            max(&g.regrets),
            mean_stderr(&g.switches).0,
            g.failed
        );
    }
    out.push_str("checks:\n");
    for c in &report.checks {
        let slack = if c.slack > 0.0 {
            format!(" + {}·{:.4}", c.slack, c.stderr)
        } else {
            String::new()
        };
        let _ = writeln!(out, "  {} [{}] {}: {} ≤ {}{}", c.verdict().to_uppercase(), c.formula, c.name, c.lhs, c.rhs, slack);
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for e in &report.errors {
        let _ = writeln!(out, "error: {e}");
    }
    let _ = writeln!(out, "failures: {} checks, {} errors", report.failures().len(), report.errors.len());
    out
}

/// Renders `report` in `format`; writes it to `path` when given.
pub fn emit_report(report: &SuiteReport, format: ReportFormat, path: Option<&Path>) -> Result<String, HarnessError> {
    if report.records.is_empty() {
        return Err(HarnessError::Config("no records to report".into()));
    }
    let text = match format {
        ReportFormat::Csv => to_csv(&report.records),
        ReportFormat::Jsonl => to_jsonl(&report.records),
        ReportFormat::Summary => to_summary(report),
    };
    if let Some(path) = path {
        std::fs::write(path, &text).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(text)
}

/// Records whose verdict is "fail".
pub fn failing_records(records: &[RunRecord]) -> usize {
    records.iter().filter(|r| meta(r, "verdict", "na") == "fail").count()
}
