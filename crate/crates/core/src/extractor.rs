//! Validating raw inline tests into declarations bound to their targets.
//!
//! Extraction is purely syntactic: argument expressions are captured as
//! source text and nothing from the subject file is evaluated.

use std::collections::BTreeSet;
use std::fmt;

use rustpython_parser::ast::{self, Constant, Expr, Ranged};
use serde::{Deserialize, Serialize};

use crate::error::{CollectionError, CollectionWarning, ReasonCode};
use crate::finder::{self, RawInlineTest, Usage, CONSTRUCTOR};
use crate::names;
use crate::source::{Location, SourceFile};
use crate::walk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Eq,
    Neq,
    True,
    False,
    None,
    NotNone,
    Same,
    NotSame,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Eq,
        CheckKind::Neq,
        CheckKind::True,
        CheckKind::False,
        CheckKind::None,
        CheckKind::NotNone,
        CheckKind::Same,
        CheckKind::NotSame,
    ];

    pub fn from_method(name: &str) -> Option<CheckKind> {
        CheckKind::ALL.into_iter().find(|k| k.method() == name)
    }

    pub fn method(self) -> &'static str {
        match self {
            CheckKind::Eq => "check_eq",
            CheckKind::Neq => "check_neq",
            CheckKind::True => "check_true",
            CheckKind::False => "check_false",
            CheckKind::None => "check_none",
            CheckKind::NotNone => "check_not_none",
            CheckKind::Same => "check_same",
            CheckKind::NotSame => "check_not_same",
        }
    }

    /// Short name used in the sentinel protocol and reports.
    pub fn as_str(self) -> &'static str {
        &self.method()["check_".len()..]
    }

    /// Binary kinds compare an actual value against an expected one.
    pub fn is_binary(self) -> bool {
        matches!(
            self,
            CheckKind::Eq | CheckKind::Neq | CheckKind::Same | CheckKind::NotSame
        )
    }

    pub fn arity(self) -> usize {
        if self.is_binary() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An argument expression captured as text. List literals also keep their
/// element texts for parameterization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueExpr {
    pub text: String,
    pub list_items: Option<Vec<String>>,
}

impl ValueExpr {
    fn capture(source: &SourceFile, expr: &Expr) -> ValueExpr {
        let list_items = match expr {
            Expr::List(list) => Some(list.elts.iter().map(|e| source.expr_text(e)).collect()),
            _ => None,
        };
        ValueExpr {
            text: source.expr_text(expr),
            list_items,
        }
    }

    pub fn plain(text: impl Into<String>) -> ValueExpr {
        ValueExpr {
            text: text.into(),
            list_items: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub kind: CheckKind,
    pub actual: ValueExpr,
    /// Present iff `kind` is binary.
    pub expected: Option<ValueExpr>,
}

impl Check {
    /// `check_eq(actual, expected)` as it would be written in source.
    pub fn call_text(&self) -> String {
        render_check(
            self.kind,
            &self.actual.text,
            self.expected.as_ref().map(|e| e.text.as_str()),
        )
    }
}

pub fn render_check(kind: CheckKind, actual: &str, expected: Option<&str>) -> String {
    match expected {
        Some(expected) => format!("{}({}, {})", kind.method(), actual, expected),
        None => format!("{}({})", kind.method(), actual),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub name: String,
    pub value: ValueExpr,
}

/// The statement under test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetStatement {
    /// Source of the statement moved to column 0, with any inline tests
    /// nested inside it replaced by `pass`.
    pub text: String,
    pub location: Location,
    pub free_names: BTreeSet<String>,
    pub bound_names: BTreeSet<String>,
    /// Whether the statement sits directly in the module body.
    pub module_level: bool,
    /// Index of the top-level statement that is or contains the target.
    pub top_level_index: usize,
}

/// A validated inline test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InlineTestDecl {
    pub test_name: Option<String>,
    pub parameterized: bool,
    pub repeated: u32,
    pub tags: Vec<String>,
    pub disabled: bool,
    /// Seconds.
    pub timeout: Option<f64>,
    pub assumptions: Vec<String>,
    pub assignments: Vec<Assignment>,
    pub checks: Vec<Check>,
    pub location: Location,
    pub target: TargetStatement,
}

impl InlineTestDecl {
    /// Re-serializes the declaration as an API chain.
    pub fn to_chain_source(&self) -> String {
        let mut ctor: Vec<String> = Vec::new();
        if let Some(name) = &self.test_name {
            ctor.push(format!("test_name={}", py_str(name)));
        }
        if self.parameterized {
            ctor.push("parameterized=True".into());
        }
        if self.repeated != 1 {
            ctor.push(format!("repeated={}", self.repeated));
        }
        if !self.tags.is_empty() {
            let tags: Vec<String> = self.tags.iter().map(|t| py_str(t)).collect();
            ctor.push(format!("tag=[{}]", tags.join(", ")));
        }
        if self.disabled {
            ctor.push("disabled=True".into());
        }
        if let Some(timeout) = self.timeout {
            ctor.push(format!("timeout={timeout}"));
        }
        let mut out = format!("{CONSTRUCTOR}({})", ctor.join(", "));
        for assumption in &self.assumptions {
            out.push_str(&format!(".assume({assumption})"));
        }
        for a in &self.assignments {
            out.push_str(&format!(".given({}, {})", a.name, a.value.text));
        }
        for check in &self.checks {
            out.push('.');
            out.push_str(&check.call_text());
        }
        out
    }
}

/// Python string literal for `s`; JSON escapes are valid Python escapes.
fn py_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

/// Finds the statement an inline test checks: the nearest preceding
/// statement in the same block that is not itself an inline test.
pub fn resolve_target(
    source: &SourceFile,
    raw: &RawInlineTest<'_>,
) -> Result<TargetStatement, CollectionError> {
    let target = raw.block[..raw.index_in_block]
        .iter()
        .rev()
        .find(|s| !finder::is_inline_test_stmt(s))
        .ok_or_else(|| {
            malformed(
                raw,
                ReasonCode::NoTarget,
                "inline test has no preceding statement in its block",
            )
        })?;

    let mut blank = Vec::new();
    walk::walk_stmts(std::slice::from_ref(target), &mut |s| {
        if finder::is_inline_test_stmt(s) {
            blank.push(s.range());
        }
    });
    let top_level_index = source
        .suite
        .iter()
        .position(|s| s.range().contains_range(target.range()))
        .unwrap_or(0);
    Ok(TargetStatement {
        text: source.statement_text(target, &blank, ""),
        location: source.location(crate::source::offset(target.start())),
        free_names: names::stmt_free_names(target),
        bound_names: names::bound_names(target),
        module_level: raw.module_level,
        top_level_index,
    })
}

fn malformed(
    raw: &RawInlineTest<'_>,
    reason: ReasonCode,
    message: impl Into<String>,
) -> CollectionError {
    CollectionError::new(
        raw.location.path.clone(),
        Some(raw.location.line),
        reason,
        message,
    )
}

/// Resolves the target and walks the API chain into a declaration.
pub fn extract_declaration(
    source: &SourceFile,
    raw: &RawInlineTest<'_>,
) -> Result<InlineTestDecl, CollectionError> {
    if raw.usage == Usage::SubExpression {
        return Err(malformed(
            raw,
            ReasonCode::NotAStatement,
            "itest() must be used as a statement of its own, not inside an expression",
        ));
    }
    let target = resolve_target(source, raw)?;

    // Unwind `itest(...).m1(...).m2(...)` from the outside in.
    let mut calls: Vec<(&str, &ast::ExprCall)> = Vec::new();
    let mut current = raw.expr;
    let constructor = loop {
        match current {
            Expr::Call(call) => match call.func.as_ref() {
                Expr::Attribute(attr) => {
                    calls.push((attr.attr.as_str(), call));
                    current = &attr.value;
                }
                Expr::Name(n) if n.id.as_str() == CONSTRUCTOR => break call,
                _ => {
                    return Err(malformed(
                        raw,
                        ReasonCode::UnknownMethod,
                        "unsupported call in inline test chain",
                    ))
                }
            },
            Expr::Attribute(attr) => {
                return Err(malformed(
                    raw,
                    ReasonCode::UnknownMethod,
                    format!("`{}` is accessed but not called", attr.attr),
                ))
            }
            _ => {
                return Err(malformed(
                    raw,
                    ReasonCode::UnknownMethod,
                    "the itest constructor must be called: itest(...)",
                ))
            }
        }
    };
    calls.reverse();

    let mut decl = InlineTestDecl {
        test_name: None,
        parameterized: false,
        repeated: 1,
        tags: Vec::new(),
        disabled: false,
        timeout: None,
        assumptions: Vec::new(),
        assignments: Vec::new(),
        checks: Vec::new(),
        location: raw.location.clone(),
        target,
    };
    constructor_args(source, raw, constructor, &mut decl)?;

    for (method, call) in calls {
        let positional_only =
            call.keywords.is_empty() && !call.args.iter().any(|a| matches!(a, Expr::Starred(_)));
        let expect_arity = |n: usize| -> Result<(), CollectionError> {
            if positional_only && call.args.len() == n {
                Ok(())
            } else {
                Err(malformed(
                    raw,
                    ReasonCode::BadArity,
                    format!(
                        "{method}() takes exactly {n} positional argument{}",
                        if n == 1 { "" } else { "s" }
                    ),
                ))
            }
        };
        match method {
            "given" => {
                if !decl.checks.is_empty() {
                    return Err(malformed(
                        raw,
                        ReasonCode::GivenAfterCheck,
                        "given() must come before the first check_* call",
                    ));
                }
                expect_arity(2)?;
                let Expr::Name(var) = &call.args[0] else {
                    return Err(malformed(
                        raw,
                        ReasonCode::NonIdentifierGivenTarget,
                        format!(
                            "the first argument of given() must be a variable name, got `{}`",
                            source.node_text(&call.args[0])
                        ),
                    ));
                };
                if decl.assignments.iter().any(|a| a.name == var.id.as_str()) {
                    return Err(malformed(
                        raw,
                        ReasonCode::DuplicateGiven,
                        format!("variable `{}` is given more than once", var.id),
                    ));
                }
                decl.assignments.push(Assignment {
                    name: var.id.to_string(),
                    value: ValueExpr::capture(source, &call.args[1]),
                });
            }
            "assume" => {
                if !decl.checks.is_empty() {
                    return Err(malformed(
                        raw,
                        ReasonCode::GivenAfterCheck,
                        "assume() must come before the first check_* call",
                    ));
                }
                expect_arity(1)?;
                decl.assumptions.push(source.expr_text(&call.args[0]));
            }
            other => {
                let Some(kind) = CheckKind::from_method(other) else {
                    return Err(malformed(
                        raw,
                        ReasonCode::UnknownMethod,
                        format!("`{other}` is not part of the inline test API"),
                    ));
                };
                expect_arity(kind.arity())?;
                decl.checks.push(Check {
                    kind,
                    actual: ValueExpr::capture(source, &call.args[0]),
                    expected: kind
                        .is_binary()
                        .then(|| ValueExpr::capture(source, &call.args[1])),
                });
            }
        }
    }

    if decl.checks.is_empty() {
        return Err(malformed(
            raw,
            ReasonCode::NoCheck,
            "inline test has no check_* call",
        ));
    }
    Ok(decl)
}

fn constructor_args(
    source: &SourceFile,
    raw: &RawInlineTest<'_>,
    call: &ast::ExprCall,
    decl: &mut InlineTestDecl,
) -> Result<(), CollectionError> {
    let bad = |message: String| malformed(raw, ReasonCode::BadConstructorArg, message);
    if let Some(arg) = call.args.first() {
        return Err(bad(format!(
            "itest() takes keyword arguments only, got positional `{}`",
            source.node_text(arg)
        )));
    }
    let mut seen = BTreeSet::new();
    for keyword in &call.keywords {
        let Some(name) = &keyword.arg else {
            return Err(bad("itest() does not accept **kwargs".into()));
        };
        if !seen.insert(name.as_str()) {
            return Err(bad(format!("keyword `{name}` given twice")));
        }
        let value = &keyword.value;
        let literal_error = |expected: &str| {
            bad(format!(
                "`{name}` must be {expected}, got `{}`",
                source.node_text(value)
            ))
        };
        match name.as_str() {
            "test_name" => {
                decl.test_name =
                    Some(string_literal(value).ok_or_else(|| literal_error("a string literal"))?);
            }
            "parameterized" => {
                decl.parameterized =
                    bool_literal(value).ok_or_else(|| literal_error("True or False"))?;
            }
            "disabled" => {
                decl.disabled =
                    bool_literal(value).ok_or_else(|| literal_error("True or False"))?;
            }
            "repeated" => {
                decl.repeated = number_literal(value)
                    .filter(|n| n.fract() == 0.0 && *n >= 1.0 && *n <= u32::MAX as f64)
                    .filter(|_| is_int_literal(value))
                    .map(|n| n as u32)
                    .ok_or_else(|| literal_error("a positive integer literal"))?;
            }
            "timeout" => {
                decl.timeout = Some(
                    number_literal(value)
                        .filter(|n| *n > 0.0 && n.is_finite())
                        .ok_or_else(|| literal_error("a positive number literal"))?,
                );
            }
            "tag" => {
                let items = match value {
                    Expr::List(l) => &l.elts,
                    Expr::Tuple(t) => &t.elts,
                    _ => return Err(literal_error("a list of string literals")),
                };
                decl.tags = items
                    .iter()
                    .map(string_literal)
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| literal_error("a list of string literals"))?;
            }
            other => return Err(bad(format!("unknown itest() argument `{other}`"))),
        }
    }
    Ok(())
}

fn string_literal(expr: &Expr) -> Option<String> {
    match expr {
        Expr::Constant(c) => match &c.value {
            Constant::Str(s) => Some(s.clone()),
            _ => None,
        },
        _ => None,
    }
}

fn bool_literal(expr: &Expr) -> Option<bool> {
    match expr {
        Expr::Constant(c) => match c.value {
            Constant::Bool(b) => Some(b),
            _ => None,
        },
        _ => None,
    }
}

fn is_int_literal(expr: &Expr) -> bool {
    matches!(expr, Expr::Constant(c) if matches!(c.value, Constant::Int(_)))
}

/// Int or float literal, with an optional leading minus.
fn number_literal(expr: &Expr) -> Option<f64> {
    match expr {
        Expr::Constant(c) => match &c.value {
            Constant::Int(i) => i.to_string().parse().ok(),
            Constant::Float(f) => Some(*f),
            _ => None,
        },
        Expr::UnaryOp(u) if matches!(u.op, ast::UnaryOp::USub) => {
            number_literal(&u.operand).map(|n| -n)
        }
        _ => None,
    }
}

/// Number of test cases a declaration expands to.
///
/// In a parameterized test every `given` value must be a list literal, and
/// every list literal among the `given` values and `check_*` arguments must
/// have the same length.
pub fn validate_parameterization(decl: &InlineTestDecl) -> Result<usize, CollectionError> {
    if !decl.parameterized {
        return Ok(1);
    }
    let error = |reason, message: String| {
        CollectionError::new(
            decl.location.path.clone(),
            Some(decl.location.line),
            reason,
            message,
        )
    };
    let mut lengths: Vec<(String, usize)> = Vec::new();
    for a in &decl.assignments {
        match &a.value.list_items {
            Some(items) => lengths.push((format!("given `{}`", a.name), items.len())),
            None => {
                return Err(error(
                    ReasonCode::ParamNotList,
                    format!(
                        "parameterized given value for `{}` is not a list literal",
                        a.name
                    ),
                ))
            }
        }
    }
    for check in &decl.checks {
        for value in std::iter::once(&check.actual).chain(&check.expected) {
            if let Some(items) = &value.list_items {
                lengths.push((
                    format!("{} argument `{}`", check.kind.method(), value.text),
                    items.len(),
                ));
            }
        }
    }
    let Some((_, n)) = lengths.first().cloned() else {
        return Err(error(
            ReasonCode::ParamNotList,
            "parameterized inline test has no list-literal values".into(),
        ));
    };
    if let Some((what, len)) = lengths.iter().find(|(_, len)| *len != n) {
        return Err(error(
            ReasonCode::ParamLengthMismatch,
            format!("{what} has {len} values, expected {n}"),
        ));
    }
    if n == 0 {
        return Err(error(
            ReasonCode::ParamLengthMismatch,
            "parameter lists must not be empty".into(),
        ));
    }
    Ok(n)
}

/// Warnings for `given` variables the target never reads.
pub fn given_warnings(decl: &InlineTestDecl) -> Vec<CollectionWarning> {
    decl.assignments
        .iter()
        .filter(|a| !decl.target.free_names.contains(&a.name))
        .map(|a| CollectionWarning {
            path: decl.location.path.clone(),
            line: decl.location.line,
            message: format!(
                "given variable `{}` is not read by the target statement on line {}",
                a.name, decl.target.location.line
            ),
        })
        .collect()
}

/// Finds and extracts every inline test in `source`. Malformed tests are
/// returned as errors alongside the valid declarations.
pub fn extract_all(source: &SourceFile) -> (Vec<InlineTestDecl>, Vec<CollectionError>) {
    let mut decls = Vec::new();
    let mut errors = Vec::new();
    for raw in finder::find_inline_tests(source) {
        match extract_declaration(source, &raw) {
            Ok(decl) => decls.push(decl),
            Err(e) => errors.push(e),
        }
    }
    (decls, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extract_one(body: &str) -> Result<InlineTestDecl, CollectionError> {
        let text = format!("import re\nfrom inline import itest\n{body}");
        let source = SourceFile::parse("t.py", text).unwrap();
        let raws = finder::find_inline_tests(&source);
        assert_eq!(raws.len(), 1, "expected exactly one inline test");
        extract_declaration(&source, &raws[0])
    }

    fn reason(body: &str) -> ReasonCode {
        extract_one(body).unwrap_err().reason
    }

    const TARGET: &str = "m = re.match(\"^(.+):\\\\d+$\", name)\n";

    #[test]
    fn display_name_example() {
        let decl = extract_one(&format!(
            "{TARGET}itest(test_name=\"check_match_name\").given(name,\"a:0\").check_eq(m.group(1),\"a\")\n"
        ))
        .unwrap();
        assert_eq!(decl.test_name.as_deref(), Some("check_match_name"));
        assert_eq!(decl.assignments.len(), 1);
        assert_eq!(decl.assignments[0].name, "name");
        assert_eq!(decl.assignments[0].value.text, "\"a:0\"");
        assert_eq!(decl.checks[0].kind, CheckKind::Eq);
        assert_eq!(decl.checks[0].actual.text, "m.group(1)");
        assert_eq!(decl.checks[0].expected.as_ref().unwrap().text, "\"a\"");
        assert_eq!(decl.target.text, "m = re.match(\"^(.+):\\\\d+$\", name)");
        assert_eq!(decl.target.location.line, 3);
        assert!(decl.target.free_names.contains("name"));
        assert!(decl.target.bound_names.contains("m"));
    }

    #[test]
    fn timeout_without_given() {
        let decl = extract_one("x = 1\nitest(timeout=5).check_true(x)\n").unwrap();
        assert_eq!(decl.timeout, Some(5.0));
        assert!(decl.assignments.is_empty());
        assert_eq!(decl.checks[0].kind, CheckKind::True);
        assert!(decl.checks[0].expected.is_none());
    }

    #[test]
    fn constructor_options() {
        let decl = extract_one(
            "x = 1\nitest(repeated=3, tag=[\"str\", \"bit\"], disabled=True, parameterized=False, timeout=0.5).check_true(x)\n",
        )
        .unwrap();
        assert_eq!(decl.repeated, 3);
        assert_eq!(decl.tags, vec!["str", "bit"]);
        assert!(decl.disabled);
        assert_eq!(decl.timeout, Some(0.5));
    }

    #[test]
    fn malformed_reasons() {
        assert_eq!(
            reason(&format!("{TARGET}itest().given(name,\"a:0\")\n")),
            ReasonCode::NoCheck
        );
        assert_eq!(
            reason(&format!(
                "{TARGET}itest().check_eq(m.group(1),\"a\").given(name,\"a:0\")\n"
            )),
            ReasonCode::GivenAfterCheck
        );
        assert_eq!(
            reason("x = 1\nitest().check_true(x).assume(x)\n"),
            ReasonCode::GivenAfterCheck
        );
        assert_eq!(
            reason("x = 1\nitest().given(x, 1).verify(x)\n"),
            ReasonCode::UnknownMethod
        );
        assert_eq!(
            reason("x = 1\nitest.given(x, 1).check_true(x)\n"),
            ReasonCode::UnknownMethod
        );
        assert_eq!(reason("x = 1\nitest().check_eq(x)\n"), ReasonCode::BadArity);
        assert_eq!(
            reason("x = 1\nitest().check_none(x, None)\n"),
            ReasonCode::BadArity
        );
        assert_eq!(
            reason("x = 1\nitest().given(x).check_true(x)\n"),
            ReasonCode::BadArity
        );
        assert_eq!(
            reason("x = 1\nitest().given(x, value=1).check_true(x)\n"),
            ReasonCode::BadArity
        );
        assert_eq!(
            reason("x = 1\nitest(repeated=n).check_true(x)\n"),
            ReasonCode::BadConstructorArg
        );
        assert_eq!(
            reason("x = 1\nitest(repeated=0).check_true(x)\n"),
            ReasonCode::BadConstructorArg
        );
        assert_eq!(
            reason("x = 1\nitest(timeout=-1).check_true(x)\n"),
            ReasonCode::BadConstructorArg
        );
        assert_eq!(
            reason("x = 1\nitest(colour=\"red\").check_true(x)\n"),
            ReasonCode::BadConstructorArg
        );
        assert_eq!(
            reason("x = 1\nitest(\"name\").check_true(x)\n"),
            ReasonCode::BadConstructorArg
        );
        assert_eq!(
            reason("x = 1\nitest().given(a.b, 1).check_true(x)\n"),
            ReasonCode::NonIdentifierGivenTarget
        );
        assert_eq!(
            reason("x = 1\nitest().given(x, 1).given(x, 2).check_true(x)\n"),
            ReasonCode::DuplicateGiven
        );
        assert_eq!(
            reason("x = 1\nt = itest().check_true(x)\n"),
            ReasonCode::NotAStatement
        );
    }

    #[test]
    fn no_target_when_first_in_block() {
        let err = extract_one("def f():\n    itest().check_true(1)\n").unwrap_err();
        assert_eq!(err.reason, ReasonCode::NoTarget);
        assert_eq!(err.line, Some(4));
    }

    #[test]
    fn consecutive_tests_share_target() {
        let text =
            "from inline import itest\nx = 2\nitest().check_eq(x, 2)\nitest().check_true(x)\n";
        let source = SourceFile::parse("t.py", text.into()).unwrap();
        let (decls, errors) = extract_all(&source);
        assert!(errors.is_empty());
        assert_eq!(decls.len(), 2);
        assert_eq!(decls[0].target, decls[1].target);
        assert_eq!(decls[0].target.location.line, 2);
    }

    #[test]
    fn parameterization_counts() {
        let decl = extract_one(&format!(
            "{TARGET}itest(parameterized=True).given(name,[\"a:0\",\"a:1:1\"]).check_eq(m.group(1), [\"a\", \"a:1\"])\n"
        ))
        .unwrap();
        assert_eq!(validate_parameterization(&decl).unwrap(), 2);

        let plain = extract_one("x = 1\nitest().check_true(x)\n").unwrap();
        assert_eq!(validate_parameterization(&plain).unwrap(), 1);

        let mismatch = extract_one(
            "y = x\nitest(parameterized=True).given(x, [1, 2]).check_eq(y, [1, 2, 3])\n",
        )
        .unwrap();
        assert_eq!(
            validate_parameterization(&mismatch).unwrap_err().reason,
            ReasonCode::ParamLengthMismatch
        );

        let not_list =
            extract_one("y = x\nitest(parameterized=True).given(x, 1).check_eq(y, [1])\n").unwrap();
        assert_eq!(
            validate_parameterization(&not_list).unwrap_err().reason,
            ReasonCode::ParamNotList
        );
    }

    #[test]
    fn multiline_arguments_are_parenthesized() {
        let decl =
            extract_one("y = x\nitest().given(x, [1,\n    2]).check_eq(y, [1, 2])\n").unwrap();
        assert_eq!(decl.assignments[0].value.text, "([1,\n    2])");
    }

    #[test]
    fn unread_given_warns() {
        let decl = extract_one("y = x\nitest().given(x, 1).given(z, 2).check_eq(y, 1)\n").unwrap();
        let warnings = given_warnings(&decl);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].message.contains("`z`"));
    }

    #[test]
    fn chain_source_round_trip() {
        let decl = extract_one(
            "y = x\nitest(test_name=\"n\", repeated=2, tag=[\"a\"], timeout=1.5).assume(x > 0).given(x, 3).check_eq(y, 3).check_not_none(y)\n",
        )
        .unwrap();
        let again = extract_one(&format!("y = x\n{}\n", decl.to_chain_source())).unwrap();
        assert_eq!(decl.to_chain_source(), again.to_chain_source());
        assert_eq!(decl.checks, again.checks);
        assert_eq!(decl.assignments, again.assignments);
    }
}
