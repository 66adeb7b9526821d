//! Turning declarations into standalone test programs.
//!
//! Each test case becomes a Python module built from the subject file's
//! relevant top-level statements, the `given` assignments, the target
//! statement and one instrumented assertion per check. Dependencies are
//! sliced from the subject file by name: only imports, definitions and
//! assignments that the body (transitively) reads are copied.

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use rustpython_parser::ast::{self, Stmt};
use rustpython_parser::Parse;
use serde::Serialize;

use crate::error::{CollectionError, ReasonCode};
use crate::extractor::{render_check, CheckKind, InlineTestDecl, ValueExpr};
use crate::finder;
use crate::names;
use crate::sentinel;
use crate::source::{indent_code, SourceFile};
use crate::walk;

/// Generated source for one test case.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TestProgram {
    /// `from __future__` imports of the subject file; they must come first.
    pub future_imports: Vec<String>,
    pub support_statements: Vec<String>,
    pub input_statements: Vec<String>,
    pub target_text: String,
    pub assertion_statements: Vec<String>,
    /// Conjunction of all `assume` expressions.
    pub assumption_expr: Option<String>,
}

impl TestProgram {
    /// Inputs, target and assertions, optionally guarded by the assumption,
    /// followed by the pass marker.
    pub fn body(&self) -> String {
        let mut body = String::new();
        for line in &self.input_statements {
            body.push_str(line);
            body.push('\n');
        }
        body.push_str(&self.target_text);
        body.push('\n');
        for line in &self.assertion_statements {
            body.push_str(line);
            body.push('\n');
        }
        body.push_str(&sentinel::pass_statement());
        body.push('\n');
        match &self.assumption_expr {
            None => body,
            Some(assumption) => format!(
                "if {assumption}:\n{}else:\n    {}\n",
                indent_code(&body, "    "),
                sentinel::skip_statement()
            ),
        }
    }

    /// The complete program text.
    pub fn render(&self, id: &str) -> String {
        let mut out = String::new();
        for line in &self.future_imports {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("# inline test {id}\n"));
        out.push_str(sentinel::PRELUDE);
        out.push_str("\n\n");
        for stmt in &self.support_statements {
            out.push_str(stmt);
            out.push('\n');
        }
        if !self.support_statements.is_empty() {
            out.push('\n');
        }
        out.push_str(&self.body());
        out
    }
}

/// One check after parameter expansion, kept for failure reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseCheck {
    pub kind: CheckKind,
    pub actual: String,
    pub expected: Option<String>,
}

impl CaseCheck {
    pub fn call_text(&self) -> String {
        render_check(self.kind, &self.actual, self.expected.as_deref())
    }
}

/// One executable unit.
#[derive(Debug, Clone)]
pub struct TestCase {
    pub id: String,
    pub display_name: String,
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub param_index: usize,
    pub tags: Vec<String>,
    pub disabled: bool,
    pub repeated: u32,
    pub timeout: Option<Duration>,
    pub checks: Vec<CaseCheck>,
    pub decl: Arc<InlineTestDecl>,
    pub program: TestProgram,
    /// Directory of the subject file, made importable for the program.
    pub subject_dir: Option<PathBuf>,
}

impl TestCase {
    pub fn program_text(&self) -> String {
        generate_program(self)
    }
}

/// Canonical id of a case.
pub fn case_id(file: &str, line: usize, param_index: Option<usize>) -> String {
    match param_index {
        Some(i) => format!("{file}::{line}[p{i}]"),
        None => format!("{file}::{line}"),
    }
}

/// Expands a declaration into `n` cases. Case `i` takes element `i` of each
/// list-literal value; other values are shared by all cases. Support
/// statements are left empty for [`resolve_dependencies`] to fill in.
pub fn expand(
    decl: &Arc<InlineTestDecl>,
    n: usize,
    default_timeout: Option<Duration>,
) -> Vec<TestCase> {
    let pick = |value: &ValueExpr, i: usize| -> String {
        match (&value.list_items, decl.parameterized) {
            (Some(items), true) => items[i].clone(),
            _ => value.text.clone(),
        }
    };
    let timeout = decl
        .timeout
        .map(Duration::from_secs_f64)
        .or(default_timeout);
    let assumption_expr = match decl.assumptions.as_slice() {
        [] => None,
        [single] => Some(single.clone()),
        many => Some(
            many.iter()
                .map(|a| format!("({a})"))
                .collect::<Vec<_>>()
                .join(" and "),
        ),
    };

    (0..n)
        .map(|i| {
            let checks: Vec<CaseCheck> = decl
                .checks
                .iter()
                .map(|c| CaseCheck {
                    kind: c.kind,
                    actual: pick(&c.actual, i),
                    expected: c.expected.as_ref().map(|e| pick(e, i)),
                })
                .collect();
            let input_statements = decl
                .assignments
                .iter()
                .map(|a| format!("{} = {}", a.name, pick(&a.value, i)))
                .collect();
            let assertion_statements = checks
                .iter()
                .enumerate()
                .map(|(index, c)| assertion_statement(index, c))
                .collect();
            let id = case_id(
                &decl.location.path,
                decl.location.line,
                decl.parameterized.then_some(i),
            );
            TestCase {
                display_name: decl.test_name.clone().unwrap_or_else(|| id.clone()),
                id,
                file: decl.location.path.clone(),
                line: decl.location.line,
                column: decl.location.column,
                param_index: i,
                tags: decl.tags.clone(),
                disabled: decl.disabled,
                repeated: decl.repeated,
                timeout,
                checks,
                decl: Arc::clone(decl),
                program: TestProgram {
                    future_imports: Vec::new(),
                    support_statements: Vec::new(),
                    input_statements,
                    target_text: decl.target.text.clone(),
                    assertion_statements,
                    assumption_expr: assumption_expr.clone(),
                },
                subject_dir: None,
            }
        })
        .collect()
}

fn assertion_statement(index: usize, check: &CaseCheck) -> String {
    let source = serde_json::to_string(&check.actual).expect("string serialization cannot fail");
    match &check.expected {
        Some(expected) => format!(
            "__itest_check({index}, \"{}\", {source}, {}, {})",
            check.kind, check.actual, expected
        ),
        None => format!(
            "__itest_check({index}, \"{}\", {source}, {})",
            check.kind, check.actual
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Import,
    Future,
    StarImport,
    Definition,
    Assignment,
    Other,
}

#[derive(Debug)]
struct TopLevel {
    kind: Kind,
    bound: BTreeSet<String>,
    free: BTreeSet<String>,
    text: String,
}

/// Top-level statements of a subject file, indexed for dependency slicing.
#[derive(Debug)]
pub struct ModuleIndex {
    entries: Vec<TopLevel>,
}

impl ModuleIndex {
    pub fn new(source: &SourceFile) -> ModuleIndex {
        let entries = source
            .suite
            .iter()
            .map(|stmt| {
                let kind = classify(stmt);
                let mut blank = Vec::new();
                walk::walk_stmts(std::slice::from_ref(stmt), &mut |s| {
                    if finder::is_inline_test_stmt(s) {
                        blank.push(ast::Ranged::range(s));
                    }
                });
                let text = source.statement_text(stmt, &blank, "");
                // Free names come from the copied text, so names used only by
                // blanked inline tests are not pulled in.
                let free = match ast::Suite::parse(&text, "<support>") {
                    Ok(suite) => names::free_names(&suite),
                    Err(_) => names::stmt_free_names(stmt),
                };
                TopLevel {
                    kind,
                    bound: names::bound_names(stmt),
                    free: free.into_iter().filter(|n| !names::is_builtin(n)).collect(),
                    text,
                }
            })
            .collect();
        ModuleIndex { entries }
    }

    fn future_imports(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.kind == Kind::Future)
            .map(|e| e.text.clone())
            .collect()
    }
}

fn classify(stmt: &Stmt) -> Kind {
    match stmt {
        Stmt::ImportFrom(s)
            if s.module
                .as_ref()
                .is_some_and(|m| m.as_str() == "__future__") =>
        {
            Kind::Future
        }
        s if names::is_star_import(s) => Kind::StarImport,
        Stmt::Import(_) | Stmt::ImportFrom(_) => Kind::Import,
        Stmt::FunctionDef(_) | Stmt::AsyncFunctionDef(_) | Stmt::ClassDef(_) => Kind::Definition,
        Stmt::Assign(_) | Stmt::AnnAssign(_) | Stmt::AugAssign(_) | Stmt::TypeAlias(_) => {
            Kind::Assignment
        }
        _ => Kind::Other,
    }
}

/// Statements copied from the subject file into a program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Support {
    pub future_imports: Vec<String>,
    pub statements: Vec<String>,
    /// The subset of `statements` that are imports.
    pub imports: Vec<String>,
}

/// Names a program body needs that the subject file does not provide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnresolvedNames(pub Vec<String>);

/// Slices the top-level statements `program` depends on out of the subject
/// file, in source order.
///
/// A name is resolved through the imports, definitions and assignments that
/// bind it; those statements' own free names are resolved the same way.
/// When the target sits at module level only statements before it are
/// eligible. Star imports are copied as a last resort.
pub fn resolve_dependencies(
    program: &TestProgram,
    module: &ModuleIndex,
    target_top_level: Option<usize>,
) -> Result<Support, UnresolvedNames> {
    let body = program.body();
    let suite = ast::Suite::parse(&body, "<inline test>").expect("generated test body must parse");
    let needed: Vec<String> = names::free_names(&suite)
        .into_iter()
        .filter(|n| !names::is_builtin(n) && !n.starts_with(sentinel::PLUMBING_PREFIX))
        .collect();

    let limit = target_top_level.unwrap_or(module.entries.len());
    let eligible = |i: usize| {
        i < limit
            && matches!(
                module.entries[i].kind,
                Kind::Import | Kind::Definition | Kind::Assignment
            )
    };

    let mut selected = BTreeSet::new();
    let mut done: HashSet<String> = HashSet::new();
    let mut unresolved = Vec::new();
    let mut worklist = needed;
    worklist.reverse();
    while let Some(name) = worklist.pop() {
        if !done.insert(name.clone()) {
            continue;
        }
        let binders: Vec<usize> = (0..module.entries.len())
            .filter(|&i| eligible(i) && module.entries[i].bound.contains(&name))
            .collect();
        if binders.is_empty() {
            unresolved.push(name);
            continue;
        }
        for i in binders {
            if selected.insert(i) {
                worklist.extend(module.entries[i].free.iter().rev().cloned());
            }
        }
    }

    if !unresolved.is_empty() {
        let stars: Vec<usize> = (0..limit)
            .filter(|&i| module.entries[i].kind == Kind::StarImport)
            .collect();
        if stars.is_empty() {
            unresolved.sort();
            return Err(UnresolvedNames(unresolved));
        }
        selected.extend(stars);
    }

    let mut support = Support {
        future_imports: module.future_imports(),
        ..Support::default()
    };
    for i in selected {
        let entry = &module.entries[i];
        support.statements.push(entry.text.clone());
        if matches!(entry.kind, Kind::Import | Kind::StarImport) {
            support.imports.push(entry.text.clone());
        }
    }
    Ok(support)
}

/// The full program text for `case`.
pub fn generate_program(case: &TestCase) -> String {
    case.program.render(&case.id)
}

/// Expands and resolves every declaration of one file. Cases that cannot be
/// resolved become collection errors.
pub fn assemble_file(
    source: &SourceFile,
    decls: Vec<InlineTestDecl>,
    default_timeout: Option<Duration>,
) -> (Vec<(TestCase, Support)>, Vec<CollectionError>) {
    let module = ModuleIndex::new(source);
    let mut cases = Vec::new();
    let mut errors = Vec::new();
    for decl in decls {
        let n = match crate::extractor::validate_parameterization(&decl) {
            Ok(n) => n,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let decl = Arc::new(decl);
        let limit = decl
            .target
            .module_level
            .then_some(decl.target.top_level_index);
        for mut case in expand(&decl, n, default_timeout) {
            match resolve_dependencies(&case.program, &module, limit) {
                Ok(support) => {
                    case.program.future_imports = support.future_imports.clone();
                    case.program.support_statements = support.statements.clone();
                    cases.push((case, support));
                }
                Err(UnresolvedNames(missing)) => errors.push(CollectionError::new(
                    case.file.clone(),
                    Some(case.line),
                    ReasonCode::UnresolvedName,
                    format!(
                        "{}: cannot resolve {} (not given, not a builtin, not defined or imported at module level)",
                        case.id,
                        missing
                            .iter()
                            .map(|m| format!("`{m}`"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                )),
            }
        }
    }
    (cases, errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::extract_all;

    pub(crate) const REGEX_EXAMPLE: &str = r#"import re
from inline import itest

def get_assignment_map(names):
    for name in names:
        m = re.match("^(.+):\\d+$", name)
        itest().given(name, "a:0").check_eq(m.group(1), "a")
        if m is not None:
            name = m.group(1)
"#;

    fn assemble(text: &str) -> (Vec<TestCase>, Vec<CollectionError>) {
        let source = SourceFile::parse("t.py", text.to_string()).unwrap();
        let (decls, mut errors) = extract_all(&source);
        let (cases, more) = assemble_file(&source, decls, None);
        errors.extend(more);
        (cases.into_iter().map(|(c, _)| c).collect(), errors)
    }

    #[test]
    fn example_program_shape() {
        let (cases, errors) = assemble(REGEX_EXAMPLE);
        assert!(errors.is_empty(), "{errors:?}");
        let case = &cases[0];
        assert_eq!(case.id, "t.py::7");
        assert_eq!(case.display_name, "t.py::7");
        assert_eq!(case.program.support_statements, vec!["import re"]);
        assert_eq!(case.program.input_statements, vec!["name = \"a:0\""]);
        assert_eq!(
            case.program.target_text,
            "m = re.match(\"^(.+):\\\\d+$\", name)"
        );
        assert_eq!(
            case.program.assertion_statements,
            vec!["__itest_check(0, \"eq\", \"m.group(1)\", m.group(1), \"a\")"]
        );
        let text = generate_program(case);
        assert!(ast::Suite::parse(&text, "<p>").is_ok());
        assert_eq!(text.matches("m = re.match(").count(), 1);
    }

    #[test]
    fn parameterized_expansion() {
        let text = REGEX_EXAMPLE.replace(
            "itest().given(name, \"a:0\").check_eq(m.group(1), \"a\")",
            "itest(parameterized=True).given(name, [\"a:0\", \"a:1:1\"]).check_eq(m.group(1), [\"a\", \"a:1\"])",
        );
        let (cases, errors) = assemble(&text);
        assert!(errors.is_empty());
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[0].id, "t.py::7[p0]");
        assert_eq!(cases[1].id, "t.py::7[p1]");
        assert_eq!(cases[0].program.input_statements, vec!["name = \"a:0\""]);
        assert_eq!(cases[1].program.input_statements, vec!["name = \"a:1:1\""]);
        assert_eq!(cases[0].checks[0].expected.as_deref(), Some("\"a\""));
        assert_eq!(cases[1].checks[0].expected.as_deref(), Some("\"a:1\""));
    }

    #[test]
    fn constant_expected_is_replicated() {
        let text = "from inline import itest\ndef f(x):\n    y = x * 0\n    itest(parameterized=True).given(x, [1, 2, 3]).check_eq(y, 0)\n";
        let (cases, errors) = assemble(text);
        assert!(errors.is_empty());
        assert_eq!(cases.len(), 3);
        for (i, case) in cases.iter().enumerate() {
            assert_eq!(case.param_index, i);
            let program = generate_program(case);
            assert!(program.contains("__itest_check(0, \"eq\", \"y\", y, 0)"));
        }
    }

    #[test]
    fn transitive_definitions_in_source_order() {
        let text = "from inline import itest\nimport math\ndef g(v):\n    return math.sqrt(v)\nUNUSED = 3\ndef f(v):\n    return g(v) + 1\ndef main(x):\n    y = f(x)\n    itest().given(x, 4).check_eq(y, 3.0)\n";
        let (cases, errors) = assemble(text);
        assert!(errors.is_empty(), "{errors:?}");
        let support = &cases[0].program.support_statements;
        assert_eq!(support.len(), 3);
        assert_eq!(support[0], "import math");
        assert!(support[1].starts_with("def g"));
        assert!(support[2].starts_with("def f"));
    }

    #[test]
    fn function_locals_are_unresolved() {
        let text = "from inline import itest\ndef f(x):\n    w = 2\n    y = x * w\n    itest().given(x, 1).check_eq(y, 2)\n";
        let (cases, errors) = assemble(text);
        assert!(cases.is_empty());
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].reason, ReasonCode::UnresolvedName);
        assert!(errors[0].message.contains("`w`"));
    }

    #[test]
    fn assumption_wraps_body() {
        let text = "import platform\nfrom inline import itest\nx = 1\nitest().assume(platform.system() == \"Linux\").given(x, 2).check_eq(x, 2)\n";
        let (cases, errors) = assemble(text);
        assert!(errors.is_empty(), "{errors:?}");
        let program = generate_program(&cases[0]);
        assert!(program.contains("if platform.system() == \"Linux\":\n    x = 2\n"));
        assert!(program
            .contains("else:\n    __itest_sys.stdout.write(\"\\nITEST-SKIP-ASSUMPTION\\n\")"));
        assert_eq!(cases[0].program.support_statements, vec!["import platform"]);
        assert!(ast::Suite::parse(&program, "<p>").is_ok());
    }

    #[test]
    fn module_level_target_sees_only_earlier_statements() {
        let text = "from inline import itest\nx = 1\ny = x + 1\nitest().check_eq(y, 2)\nx = 100\n";
        let (cases, errors) = assemble(text);
        assert!(errors.is_empty(), "{errors:?}");
        assert_eq!(cases[0].program.support_statements, vec!["x = 1"]);
    }

    #[test]
    fn inline_tests_inside_copied_definitions_are_blanked() {
        let text = "from inline import itest\ndef helper(a):\n    b = a + 1\n    itest().given(a, 1).check_eq(b, 2)\n    return b\ndef user(v):\n    r = helper(v)\n    itest().given(v, 2).check_eq(r, 3)\n";
        let (cases, errors) = assemble(text);
        assert!(errors.is_empty(), "{errors:?}");
        let support = &cases[1].program.support_statements;
        assert_eq!(
            support,
            &vec!["def helper(a):\n    b = a + 1\n    pass\n    return b".to_string()]
        );
    }

    #[test]
    fn future_imports_lead() {
        let text = "from __future__ import annotations\nfrom inline import itest\nx = 1\nitest().check_eq(x, 1)\n";
        let (cases, _) = assemble(text);
        let program = generate_program(&cases[0]);
        assert!(program.starts_with("from __future__ import annotations\n"));
    }

    #[test]
    fn generation_is_deterministic() {
        let (a, _) = assemble(REGEX_EXAMPLE);
        let (b, _) = assemble(REGEX_EXAMPLE);
        assert_eq!(generate_program(&a[0]), generate_program(&b[0]));
    }

    #[test]
    fn program_defines_only_expected_names() {
        let (cases, _) = assemble(REGEX_EXAMPLE);
        let case = &cases[0];
        let suite = ast::Suite::parse(&generate_program(case), "<p>").unwrap();
        let mut allowed: BTreeSet<String> =
            ["re", "name", "m"].iter().map(|s| s.to_string()).collect();
        allowed.extend(case.decl.target.bound_names.iter().cloned());
        for stmt in &suite {
            for name in names::bound_names(stmt) {
                assert!(
                    allowed.contains(&name) || name.starts_with(sentinel::PLUMBING_PREFIX),
                    "unexpected top-level name {name}"
                );
            }
        }
    }
}
