//! Locating inline-test statements in a parsed file.

use rustpython_parser::ast::{Expr, Ranged, Stmt};

use crate::source::{offset, Location, SourceFile};
use crate::walk;

/// Name of the inline-test constructor.
pub const CONSTRUCTOR: &str = "itest";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Usage {
    /// `itest()...` written as an expression statement.
    Statement,
    /// `itest()` nested inside another expression, which is malformed.
    SubExpression,
}

/// An inline test as found in the tree, before validation.
#[derive(Debug, Clone)]
pub struct RawInlineTest<'a> {
    /// The statement holding the test.
    pub stmt: &'a Stmt,
    /// For [`Usage::Statement`] the whole chain; otherwise the nested
    /// `itest(...)` call.
    pub expr: &'a Expr,
    pub location: Location,
    pub block: &'a [Stmt],
    pub index_in_block: usize,
    /// Whether `block` is the module body.
    pub module_level: bool,
    pub usage: Usage,
}

/// Whether the file imports the bare name `itest` anywhere.
pub fn has_marker_import(suite: &[Stmt]) -> bool {
    let mut found = false;
    walk::walk_stmts(suite, &mut |stmt| {
        let binds = match stmt {
            Stmt::ImportFrom(s) => s.names.iter().any(|a| {
                a.name.as_str() == CONSTRUCTOR
                    && a.asname.as_ref().is_none_or(|n| n.as_str() == CONSTRUCTOR)
            }),
            Stmt::Import(s) => s.names.iter().any(|a| {
                a.asname
                    .as_ref()
                    .map_or(a.name.as_str() == CONSTRUCTOR, |n| {
                        n.as_str() == CONSTRUCTOR
                    })
            }),
            _ => false,
        };
        found |= binds;
    });
    found
}

/// The innermost expression of a call/attribute chain: `a.b().c()` → `a`.
pub fn chain_root(expr: &Expr) -> &Expr {
    match expr {
        Expr::Call(c) => chain_root(&c.func),
        Expr::Attribute(a) => chain_root(&a.value),
        other => other,
    }
}

fn is_constructor_name(expr: &Expr) -> bool {
    matches!(expr, Expr::Name(n) if n.id.as_str() == CONSTRUCTOR)
}

/// Whether `stmt` is an expression statement whose chain starts with `itest`.
pub fn is_inline_test_stmt(stmt: &Stmt) -> bool {
    match stmt {
        Stmt::Expr(s) => {
            matches!(s.value.as_ref(), Expr::Call(_) | Expr::Attribute(_))
                && is_constructor_name(chain_root(&s.value))
        }
        _ => false,
    }
}

/// All inline tests of `source` in source order. Files without the marker
/// import yield nothing.
pub fn find_inline_tests(source: &SourceFile) -> Vec<RawInlineTest<'_>> {
    let mut found = Vec::new();
    if !has_marker_import(&source.suite) {
        return found;
    }
    scan_block(source, &source.suite, true, &mut found);
    found.sort_by_key(|t| (t.location.line, t.location.column));
    found
}

fn scan_block<'a>(
    source: &'a SourceFile,
    block: &'a [Stmt],
    module_level: bool,
    found: &mut Vec<RawInlineTest<'a>>,
) {
    for (index, stmt) in block.iter().enumerate() {
        let chain_base = if is_inline_test_stmt(stmt) {
            let Stmt::Expr(s) = stmt else { unreachable!() };
            found.push(RawInlineTest {
                stmt,
                expr: &s.value,
                location: source.location(offset(stmt.start())),
                block,
                index_in_block: index,
                module_level,
                usage: Usage::Statement,
            });
            Some(constructor_call(&s.value))
        } else {
            None
        };

        for expr in walk::stmt_exprs(stmt) {
            walk::walk_expr(expr, &mut |e| {
                let Expr::Call(call) = e else { return };
                if !is_constructor_name(&call.func) {
                    return;
                }
                if chain_base.is_some_and(|base| std::ptr::eq(base, e)) {
                    return;
                }
                found.push(RawInlineTest {
                    stmt,
                    expr: e,
                    location: source.location(offset(e.start())),
                    block,
                    index_in_block: index,
                    module_level,
                    usage: Usage::SubExpression,
                });
            });
        }

        for child in walk::child_blocks(stmt) {
            scan_block(source, child, false, found);
        }
    }
}

/// The `itest(...)` call at the base of a chain, or the root name when the
/// constructor is not called.
fn constructor_call(chain: &Expr) -> &Expr {
    let mut current = chain;
    loop {
        let next = match current {
            Expr::Call(c) if is_constructor_name(&c.func) => return current,
            Expr::Call(c) => &c.func,
            Expr::Attribute(a) => &a.value,
            _ => return current,
        };
        current = next;
    }
}
