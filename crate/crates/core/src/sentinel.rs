//! The protocol between generated programs and the executor.
//!
//! A generated program finishes by writing exactly one marker line to its
//! standard output:
//!
//! * `ITEST-PASS` when every check held,
//! * `ITEST-SKIP-ASSUMPTION` when the assumption was false,
//! * `ITEST-FAIL {json}` followed by exit status 1 when a check failed.
//!
//! The JSON record carries the check index and kind, the source text of
//! the actual expression and the interpreter's `repr` of both values.

use serde::{Deserialize, Serialize};

use crate::extractor::CheckKind;

pub const PASS: &str = "ITEST-PASS";
pub const SKIP_ASSUMPTION: &str = "ITEST-SKIP-ASSUMPTION";
pub const FAIL: &str = "ITEST-FAIL";
const MARKER_PREFIX: &str = "ITEST-";

/// Prefix of every name the generated plumbing defines.
pub const PLUMBING_PREFIX: &str = "__itest_";

/// Helpers emitted at the top of every generated program.
pub const PRELUDE: &str = r#"import sys as __itest_sys
import json as __itest_json


def __itest_repr(value):
    try:
        return repr(value)
    except BaseException as exc:
        return "<repr() raised %s>" % type(exc).__name__


def __itest_check(index, kind, actual_expr, actual, *expected):
    if kind == "eq":
        ok = actual == expected[0]
    elif kind == "neq":
        ok = actual != expected[0]
    elif kind == "true":
        ok = actual
    elif kind == "false":
        ok = not actual
    elif kind == "none":
        ok = actual is None
    elif kind == "not_none":
        ok = actual is not None
    elif kind == "same":
        ok = actual is expected[0]
    else:
        ok = actual is not expected[0]
    if ok:
        return
    record = {
        "check_index": index,
        "kind": kind,
        "actual_expr": actual_expr,
        "actual_repr": __itest_repr(actual),
    }
    if expected:
        record["expected_repr"] = __itest_repr(expected[0])
    __itest_sys.stdout.write("\nITEST-FAIL " + __itest_json.dumps(record, sort_keys=True) + "\n")
    __itest_sys.stdout.flush()
    __itest_sys.exit(1)
"#;

/// Statement that reports a pass.
pub fn pass_statement() -> String {
    format!("__itest_sys.stdout.write(\"\\n{PASS}\\n\")")
}

/// Statement that reports a skipped assumption.
pub fn skip_statement() -> String {
    format!("__itest_sys.stdout.write(\"\\n{SKIP_ASSUMPTION}\\n\")")
}

/// Structured data about a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub check_index: usize,
    pub kind: CheckKind,
    pub actual_expr: String,
    pub actual_repr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_repr: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sentinel {
    Pass,
    SkipAssumption,
    Fail(FailureRecord),
    /// A marker line that could not be decoded.
    Garbled(String),
}

/// The last marker line in `stdout`, if any.
pub fn parse_last(stdout: &str) -> Option<Sentinel> {
    let line = stdout
        .lines()
        .rev()
        .map(str::trim_end)
        .find(|l| l.starts_with(MARKER_PREFIX))?;
    Some(match line {
        PASS => Sentinel::Pass,
        SKIP_ASSUMPTION => Sentinel::SkipAssumption,
        _ => match line.strip_prefix(FAIL).map(str::trim_start) {
            Some(json) => match serde_json::from_str(json) {
                Ok(record) => Sentinel::Fail(record),
                Err(_) => Sentinel::Garbled(line.to_string()),
            },
            None => Sentinel::Garbled(line.to_string()),
        },
    })
}
