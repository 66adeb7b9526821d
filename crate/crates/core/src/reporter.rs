//! Terminal and JSON reports, and the process exit code.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CollectionError, CollectionWarning, ReasonCode};
use crate::executor::{Status, TestOutcome};

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The parts of the configuration that affect which tests run and how.
/// Worker count is left out: it does not change results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub paths: Vec<String>,
    pub group_tags: Vec<String>,
    pub order_tags: Vec<String>,
    pub name_filter: Option<String>,
    pub ignore_import_errors: bool,
    pub default_timeout_s: Option<f64>,
    pub interpreter_command: Vec<String>,
    pub list_only: bool,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(config: &RunConfig) -> Self {
        ConfigEcho {
            paths: config
                .paths
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            group_tags: config.group_tags.clone(),
            order_tags: config.order_tags.clone(),
            name_filter: config.name_filter.clone(),
            ignore_import_errors: config.ignore_import_errors,
            default_timeout_s: config.default_timeout.map(|d| d.as_secs_f64()),
            interpreter_command: config.interpreter_command.clone(),
            list_only: config.list_only,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped_disabled: usize,
    pub skipped_assumption: usize,
    pub timeout: usize,
    pub error: usize,
    pub not_run: usize,
    /// Fatal collection errors.
    pub collection_errors: usize,
    /// Files skipped because of import errors.
    pub skipped_files: usize,
}

impl Totals {
    pub fn skipped(&self) -> usize {
        self.skipped_disabled + self.skipped_assumption
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: ConfigEcho,
    pub files_scanned: usize,
    pub outcomes: Vec<TestOutcome>,
    pub collection_errors: Vec<CollectionError>,
    pub warnings: Vec<CollectionWarning>,
    pub wall_time: Duration,
}

impl Report {
    /// Counts recomputed from the outcomes and collection errors.
    pub fn totals(&self) -> Totals {
        let mut t = Totals {
            cases: self.outcomes.len(),
            ..Totals::default()
        };
        for o in &self.outcomes {
            match o.status {
                Status::Passed => t.passed += 1,
                Status::Failed => t.failed += 1,
                Status::SkippedDisabled => t.skipped_disabled += 1,
                Status::SkippedAssumption => t.skipped_assumption += 1,
                Status::Timeout => t.timeout += 1,
                Status::Error => t.error += 1,
                Status::NotRun => t.not_run += 1,
            }
        }
        for e in &self.collection_errors {
            if e.reason.is_fatal() {
                t.collection_errors += 1;
            } else if e.reason == ReasonCode::ImportSkipped {
                t.skipped_files += 1;
            }
        }
        t
    }

    pub fn is_listing(&self) -> bool {
        self.config.list_only
    }
}

/// 0 on a clean run, 1 if any case failed, timed out or errored or any
/// fatal collection error occurred.
pub fn exit_code(report: &Report) -> i32 {
    let t = report.totals();
    if t.failed + t.timeout + t.error + t.collection_errors > 0 {
        1
    } else {
        0
    }
}

/// The summary line, e.g. `1 passed, 0 failed, 0 skipped, 0 timeout, 0 errors in 0.12s`.
pub fn summary_line(report: &Report) -> String {
    let t = report.totals();
    let wall = report.wall_time.as_secs_f64();
    if report.is_listing() {
        return format!(
            "{} tests collected, {} errors in {wall:.2}s",
            t.cases, t.collection_errors
        );
    }
    format!(
        "{} passed, {} failed, {} skipped, {} timeout, {} errors in {wall:.2}s",
        t.passed,
        t.failed,
        t.skipped(),
        t.timeout,
        t.error + t.collection_errors
    )
}

fn label(outcome: &TestOutcome) -> String {
    if outcome.display_name == outcome.case_id {
        outcome.case_id.clone()
    } else {
        format!("{} ({})", outcome.case_id, outcome.display_name)
    }
}

fn heading(out: &mut String, title: &str) {
    let _ = writeln!(out, "\n{:=^72}", format!(" {title} "));
}

/// Human-readable report. `verbose` adds durations and full error output.
pub fn render_terminal(report: &Report, verbose: bool) -> String {
    let mut out = String::new();
    let t = report.totals();
    let _ = writeln!(
        out,
        "collected {} inline test{} from {} file{}",
        t.cases,
        if t.cases == 1 { "" } else { "s" },
        report.files_scanned,
        if report.files_scanned == 1 { "" } else { "s" }
    );

    for o in &report.outcomes {
        if report.is_listing() {
            let mut line = label(o);
            if !o.tags.is_empty() {
                let _ = write!(line, " tags=[{}]", o.tags.join(", "));
            }
            if o.status == Status::SkippedDisabled {
                line.push_str(" disabled");
            }
            let _ = writeln!(out, "{line}");
            continue;
        }
        let _ = write!(out, "{} {}", label(o), o.status);
        if verbose {
            let _ = write!(
                out,
                " [{:.3}s, {} run{}]",
                o.duration.as_secs_f64(),
                o.repetitions_run,
                if o.repetitions_run == 1 { "" } else { "s" }
            );
        }
        out.push('\n');
    }

    if !report.collection_errors.is_empty() {
        heading(&mut out, "collection errors");
        for e in &report.collection_errors {
            let kind = if e.reason.is_fatal() {
                "ERROR"
            } else {
                "SKIPPED"
            };
            let _ = writeln!(out, "{kind} {} {}: {}", e.location(), e.reason, e.message);
        }
    }

    if !report.warnings.is_empty() {
        heading(&mut out, "warnings");
        for w in &report.warnings {
            let _ = writeln!(out, "{w}");
        }
    }

    let failures: Vec<&TestOutcome> = report
        .outcomes
        .iter()
        .filter(|o| o.failure.is_some())
        .collect();
    if !failures.is_empty() {
        heading(&mut out, "failures");
        for o in failures {
            let f = o.failure.as_ref().expect("filtered");
            let _ = writeln!(out, "{:_^72}", format!(" {} ", label(o)));
            let _ = writeln!(out, "    {}", f.check_text);
            if let Some(expected) = &f.expected_repr {
                let _ = writeln!(out, "expected: {expected}");
            }
            let _ = writeln!(out, "actual:   {}", f.actual_repr);
            if f.repetition > 0 {
                let _ = writeln!(out, "(failed on repetition {})", f.repetition + 1);
            }
        }
    }

    let problems: Vec<&TestOutcome> = report
        .outcomes
        .iter()
        .filter(|o| matches!(o.status, Status::Error | Status::Timeout))
        .collect();
    if !problems.is_empty() {
        heading(&mut out, "errors");
        for o in problems {
            let _ = writeln!(out, "{:_^72}", format!(" {} ", label(o)));
            match o.status {
                Status::Timeout => {
                    let _ = writeln!(out, "timed out");
                }
                _ => {
                    let detail = o.error_detail.as_deref().unwrap_or("");
                    if verbose {
                        let _ = writeln!(out, "{detail}");
                    } else {
                        let mut lines = detail.lines().filter(|l| !l.trim().is_empty());
                        let first = lines.next().unwrap_or("");
                        let _ = writeln!(out, "{first}");
                        if let Some(last) = lines.next_back() {
                            let _ = writeln!(out, "{}", last.trim());
                        }
                    }
                }
            }
        }
    }

    out.push('\n');
    out.push_str(&summary_line(report));
    out.push('\n');
    out
}

fn case_json(o: &TestOutcome) -> Value {
    let mut case = json!({
        "id": o.case_id,
        "name": o.display_name,
        "file": o.file,
        "line": o.line,
        "column": o.column,
        "param_index": o.param_index,
        "tags": o.tags,
        "status": o.status,
        "duration_s": o.duration.as_secs_f64(),
        "repetitions_run": o.repetitions_run,
    });
    if let Some(failure) = &o.failure {
        case["failure"] = json!(failure);
    }
    if let Some(detail) = &o.error_detail {
        case["error_detail"] = json!(detail);
    }
    case
}

/// The machine-readable report. Object keys come out sorted.
pub fn to_json(report: &Report) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "config": report.config,
        "files_scanned": report.files_scanned,
        "cases": report.outcomes.iter().map(case_json).collect::<Vec<_>>(),
        "collection_errors": report.collection_errors,
        "warnings": report.warnings,
        "totals": report.totals(),
        "wall_time_s": report.wall_time.as_secs_f64(),
    })
}

pub fn render_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(&to_json(report)).expect("report serializes");
    text.push('\n');
    text
}

pub fn emit_json(report: &Report, path: &Path) -> io::Result<()> {
    std::fs::write(path, render_json(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::executor::Failure;
    use crate::extractor::CheckKind;

    fn outcome(id: &str, status: Status) -> TestOutcome {
        TestOutcome {
            case_id: id.into(),
            display_name: id.into(),
            file: "t.py".into(),
            line: 7,
            column: 8,
            param_index: 0,
            tags: vec![],
            status,
            duration: Duration::from_millis(20),
            repetitions_run: 1,
            failure: None,
            error_detail: None,
        }
    }

    fn report(outcomes: Vec<TestOutcome>, errors: Vec<CollectionError>) -> Report {
        Report {
            config: ConfigEcho::from(&RunConfig::default()),
            files_scanned: 1,
            outcomes,
            collection_errors: errors,
            warnings: vec![],
            wall_time: Duration::from_millis(1500),
        }
    }

    #[test]
    fn empty_run() {
        let r = report(vec![], vec![]);
        assert_eq!(
            summary_line(&r),
            "0 passed, 0 failed, 0 skipped, 0 timeout, 0 errors in 1.50s"
        );
        assert_eq!(exit_code(&r), 0);
    }

    #[test]
    fn failure_block_has_check_and_reprs_only() {
        let mut o = outcome("t.py::7", Status::Failed);
        o.failure = Some(Failure {
            check_index: 0,
            kind: CheckKind::Eq,
            check_text: "check_eq(m.group(1), \"aa\")".into(),
            actual_expr: "m.group(1)".into(),
            actual_repr: "'a'".into(),
            expected_repr: Some("'aa'".into()),
            repetition: 0,
        });
        let r = report(vec![o], vec![]);
        let text = render_terminal(&r, false);
        assert!(text.contains("t.py::7 FAILED\n"));
        assert!(text.contains("    check_eq(m.group(1), \"aa\")\nexpected: 'aa'\nactual:   'a'\n"));
        assert!(!text.contains("Traceback"));
        assert_eq!(exit_code(&r), 1);
    }

    #[test]
    fn skipped_counts_both_kinds_and_errors_include_collection() {
        let r = report(
            vec![
                outcome("a", Status::SkippedDisabled),
                outcome("b", Status::SkippedAssumption),
                outcome("c", Status::Timeout),
            ],
            vec![CollectionError::new(
                "t.py",
                Some(3),
                ReasonCode::NoCheck,
                "x",
            )],
        );
        assert_eq!(
            summary_line(&r),
            "0 passed, 0 failed, 2 skipped, 1 timeout, 1 errors in 1.50s"
        );
    }

    #[test]
    fn import_skip_is_not_fatal() {
        let r = report(
            vec![],
            vec![CollectionError::new(
                "t.py",
                None,
                ReasonCode::ImportSkipped,
                "x",
            )],
        );
        assert_eq!(exit_code(&r), 0);
        assert_eq!(r.totals().skipped_files, 1);
    }

    #[test]
    fn json_shape() {
        let mut o = outcome("t.py::7", Status::Passed);
        o.tags = vec!["str".into()];
        let v = to_json(&report(vec![o], vec![]));
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["cases"][0]["status"], "PASSED");
        assert_eq!(v["cases"][0]["tags"][0], "str");
        assert!(v["cases"][0].get("failure").is_none());
        assert_eq!(v["totals"]["passed"], 1);
        assert!(v["config"].get("parallelism").is_none());
    }
}
