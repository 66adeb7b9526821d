//! Loaded Python source files and position/slicing helpers.

use std::ops::Range;
use std::path::{Path, PathBuf};

use rustpython_parser::ast::{self, Constant, Expr, Ranged, Stmt};
use rustpython_parser::text_size::TextRange;
use rustpython_parser::Parse;

use crate::walk;

/// Position of a node: 1-based line, 0-based byte column (the same
/// convention as CPython's `lineno`/`col_offset`).
#[derive(
    Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub struct Location {
    pub path: String,
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.path, self.line, self.column)
    }
}

/// A parsed subject file.
#[derive(Debug)]
pub struct SourceFile {
    pub path: PathBuf,
    /// Path as shown in ids and reports (`/`-separated, no `./` prefix).
    pub display: String,
    pub text: String,
    pub suite: Vec<Stmt>,
    line_starts: Vec<usize>,
}

/// Syntax error in a subject file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SourceFile {
    pub fn parse(path: impl Into<PathBuf>, text: String) -> Result<SourceFile, SyntaxError> {
        let path = path.into();
        let display = display_path(&path);
        let line_starts = line_starts(&text);
        match ast::Suite::parse(&text, &display) {
            Ok(suite) => Ok(SourceFile {
                path,
                display,
                text,
                suite,
                line_starts,
            }),
            Err(err) => {
                let offset = usize::from(err.offset).min(text.len());
                let (line, column) = position(&line_starts, offset);
                Err(SyntaxError {
                    line,
                    column,
                    message: err.error.to_string(),
                })
            }
        }
    }

    /// `(line, column)` of a byte offset.
    pub fn position(&self, offset: usize) -> (usize, usize) {
        position(&self.line_starts, offset)
    }

    pub fn location(&self, offset: usize) -> Location {
        let (line, column) = self.position(offset);
        Location {
            path: self.display.clone(),
            line,
            column,
        }
    }

    pub fn line_of(&self, node: &impl Ranged) -> usize {
        self.position(offset(node.start())).0
    }

    pub fn slice(&self, range: TextRange) -> &str {
        &self.text[span(range)]
    }

    pub fn node_text(&self, node: &impl Ranged) -> &str {
        self.slice(node.range())
    }

    /// Source text of `expr`, parenthesized when it spans several lines so the
    /// text stays valid outside its original brackets.
    pub fn expr_text(&self, expr: &Expr) -> String {
        let text = self.node_text(expr);
        if text.contains('\n') {
            format!("({text})")
        } else {
            text.to_string()
        }
    }

    /// Whitespace preceding `offset` on its line, or `None` when something
    /// other than whitespace precedes it (e.g. `a = 1; b = 2`).
    pub fn indent_before(&self, offset: usize) -> Option<&str> {
        let line = self.position(offset).0;
        let start = self.line_starts[line - 1];
        let prefix = &self.text[start..offset];
        prefix
            .chars()
            .all(|c| c == ' ' || c == '\t')
            .then_some(prefix)
    }

    /// Text of `stmt` moved to `indent`, with each statement in `blank_out`
    /// replaced by `pass`. Lines that start inside a string literal are left
    /// untouched so literal values do not change.
    pub fn statement_text(&self, stmt: &Stmt, blank_out: &[TextRange], indent: &str) -> String {
        let whole = span(stmt.range());
        let mut protected = Vec::new();
        walk::walk_stmt_exprs(stmt, &mut |expr| {
            if is_string_literal(expr) {
                protected.push(span(expr.range()));
            }
        });
        let mut replacements: Vec<Range<usize>> = blank_out
            .iter()
            .map(|r| span(*r))
            .filter(|r| r.start >= whole.start && r.end <= whole.end)
            .collect();
        replacements.sort_by_key(|r| r.start);

        // Splice replacements into the statement text and shift the
        // protected ranges that survive.
        let mut text = String::new();
        let mut cursor = whole.start;
        let mut shifted: Vec<Range<usize>> = Vec::new();
        for r in &replacements {
            text.push_str(&self.text[cursor..r.start]);
            text.push_str("pass");
            cursor = r.end;
        }
        text.push_str(&self.text[cursor..whole.end]);
        for p in &protected {
            if replacements
                .iter()
                .any(|r| p.start < r.end && r.start < p.end)
            {
                continue;
            }
            let delta: isize = replacements
                .iter()
                .filter(|r| r.end <= p.start)
                .map(|r| "pass".len() as isize - r.len() as isize)
                .sum();
            let start = (p.start as isize - whole.start as isize + delta) as usize;
            let end = (p.end as isize - whole.start as isize + delta) as usize;
            shifted.push(start..end);
        }

        let old_indent = self.indent_before(whole.start).unwrap_or("");
        reindent(&text, &shifted, old_indent, indent)
    }
}

/// Moves every line of `text` from `old_indent` to `new_indent`. The first
/// line is assumed to carry no indentation of its own.
pub fn reindent(
    text: &str,
    protected: &[Range<usize>],
    old_indent: &str,
    new_indent: &str,
) -> String {
    let mut out = String::with_capacity(text.len() + 16);
    let mut line_start = 0;
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let inside_literal = protected
            .iter()
            .any(|r| r.start < line_start && line_start < r.end);
        if inside_literal {
            out.push_str(line);
        } else if i == 0 {
            out.push_str(new_indent);
            out.push_str(line);
        } else if line.trim().is_empty() {
            // blank lines carry no indentation
        } else {
            let body = line.strip_prefix(old_indent).unwrap_or(line);
            out.push_str(new_indent);
            out.push_str(body);
        }
        line_start += line.len() + 1;
    }
    out
}

/// Indents standalone code (one or more statements at column 0) by
/// `indent`, leaving string-literal continuation lines alone.
pub fn indent_code(code: &str, indent: &str) -> String {
    let mut protected = Vec::new();
    if let Ok(suite) = ast::Suite::parse(code, "<generated>") {
        for stmt in &suite {
            walk::walk_stmt_exprs(stmt, &mut |expr| {
                if is_string_literal(expr) {
                    protected.push(span(expr.range()));
                }
            });
        }
    }
    reindent(code, &protected, "", indent)
}

fn is_string_literal(expr: &Expr) -> bool {
    match expr {
        Expr::Constant(c) => matches!(c.value, Constant::Str(_) | Constant::Bytes(_)),
        Expr::JoinedStr(_) => true,
        _ => false,
    }
}

pub fn offset(size: rustpython_parser::text_size::TextSize) -> usize {
    usize::from(size)
}

pub fn span(range: TextRange) -> Range<usize> {
    offset(range.start())..offset(range.end())
}

fn line_starts(text: &str) -> Vec<usize> {
    std::iter::once(0)
        .chain(text.match_indices('\n').map(|(i, _)| i + 1))
        .collect()
}

fn position(line_starts: &[usize], offset: usize) -> (usize, usize) {
    let line = match line_starts.binary_search(&offset) {
        Ok(i) => i,
        Err(i) => i - 1,
    };
    (line + 1, offset - line_starts[line])
}

/// `/`-separated path with `.` components removed.
pub fn display_path(path: &Path) -> String {
    use std::path::Component;
    let mut parts: Vec<String> = Vec::new();
    let mut absolute = false;
    for component in path.components() {
        match component {
            Component::CurDir => {}
            Component::RootDir => absolute = true,
            Component::Prefix(p) => parts.push(p.as_os_str().to_string_lossy().into_owned()),
            Component::ParentDir => parts.push("..".to_string()),
            Component::Normal(p) => parts.push(p.to_string_lossy().into_owned()),
        }
    }
    let joined = parts.join("/");
    if absolute {
        format!("/{joined}")
    } else if joined.is_empty() {
        ".".to_string()
    } else {
        joined
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> SourceFile {
        SourceFile::parse("t.py", text.to_string()).unwrap()
    }

    #[test]
    fn positions_are_one_based_lines_zero_based_columns() {
        let src = parse("a = 1\n  \nb = 2\n");
        assert_eq!(src.position(0), (1, 0));
        assert_eq!(src.position(6), (2, 0));
        assert_eq!(src.line_of(&src.suite[1]), 3);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = SourceFile::parse("bad.py", "x = 1\ndef f(:\n    pass\n".into()).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn empty_file_has_no_statements() {
        assert!(parse("").suite.is_empty());
    }

    #[test]
    fn nested_statement_is_dedented() {
        let src =
            parse("def f():\n    for x in y:\n        if x:\n            z = 1\n    return 2\n");
        let Stmt::FunctionDef(f) = &src.suite[0] else {
            panic!()
        };
        let text = src.statement_text(&f.body[0], &[], "");
        assert_eq!(text, "for x in y:\n    if x:\n        z = 1");
        let text = src.statement_text(&f.body[0], &[], "    ");
        assert_eq!(text, "    for x in y:\n        if x:\n            z = 1");
    }

    #[test]
    fn multiline_string_contents_survive_reindent() {
        let src = parse("def f():\n    s = \"\"\"a\n  b\n\"\"\"\n");
        let Stmt::FunctionDef(f) = &src.suite[0] else {
            panic!()
        };
        let text = src.statement_text(&f.body[0], &[], "");
        assert_eq!(text, "s = \"\"\"a\n  b\n\"\"\"");
    }

    #[test]
    fn blanked_statements_become_pass() {
        let src = parse("def f():\n    x = 1\n    itest().check_eq(x,\n        1)\n    return x\n");
        let Stmt::FunctionDef(f) = &src.suite[0] else {
            panic!()
        };
        let text = src.statement_text(&src.suite[0], &[f.body[1].range()], "");
        assert_eq!(text, "def f():\n    x = 1\n    pass\n    return x");
    }

    #[test]
    fn indent_code_keeps_literals() {
        let code = "if x:\n    y = '''a\nb'''\n";
        assert_eq!(
            indent_code(code, "    "),
            "    if x:\n        y = '''a\nb'''\n"
        );
    }

    #[test]
    fn display_path_drops_cur_dir() {
        assert_eq!(display_path(Path::new("./a/./b.py")), "a/b.py");
        assert_eq!(display_path(Path::new(".")), ".");
        assert_eq!(display_path(Path::new("/x/y.py")), "/x/y.py");
    }
}
