//! Name-binding analysis over Python statements.
//!
//! `free_names` answers "which names must already exist for this code to
//! run", which drives both target analysis and dependency slicing.
//! Function and lambda bodies are deferred: their reads are checked against
//! everything the enclosing block binds, not only what was bound before the
//! definition.

use std::collections::{BTreeSet, HashSet};

use rustpython_parser::ast::{self, Expr, ExprContext, Pattern, Stmt};

use crate::walk;

/// Names always available in a fresh interpreter.
pub const BUILTINS: &[&str] = &[
    "ArithmeticError",
    "AssertionError",
    "AttributeError",
    "BaseException",
    "BaseExceptionGroup",
    "BlockingIOError",
    "BrokenPipeError",
    "BufferError",
    "BytesWarning",
    "ChildProcessError",
    "ConnectionAbortedError",
    "ConnectionError",
    "ConnectionRefusedError",
    "ConnectionResetError",
    "DeprecationWarning",
    "EOFError",
    "Ellipsis",
    "EncodingWarning",
    "EnvironmentError",
    "Exception",
    "ExceptionGroup",
    "False",
    "FileExistsError",
    "FileNotFoundError",
    "FloatingPointError",
    "FutureWarning",
    "GeneratorExit",
    "IOError",
    "ImportError",
    "ImportWarning",
    "IndentationError",
    "IndexError",
    "InterruptedError",
    "IsADirectoryError",
    "KeyError",
    "KeyboardInterrupt",
    "LookupError",
    "MemoryError",
    "ModuleNotFoundError",
    "NameError",
    "None",
    "NotADirectoryError",
    "NotImplemented",
    "NotImplementedError",
    "OSError",
    "OverflowError",
    "PendingDeprecationWarning",
    "PermissionError",
    "ProcessLookupError",
    "PythonFinalizationError",
    "RecursionError",
    "ReferenceError",
    "ResourceWarning",
    "RuntimeError",
    "RuntimeWarning",
    "StopAsyncIteration",
    "StopIteration",
    "SyntaxError",
    "SyntaxWarning",
    "SystemError",
    "SystemExit",
    "TabError",
    "TimeoutError",
    "True",
    "TypeError",
    "UnboundLocalError",
    "UnicodeDecodeError",
    "UnicodeEncodeError",
    "UnicodeError",
    "UnicodeTranslateError",
    "UnicodeWarning",
    "UserWarning",
    "ValueError",
    "Warning",
    "ZeroDivisionError",
    "__annotations__",
    "__build_class__",
    "__builtins__",
    "__cached__",
    "__debug__",
    "__doc__",
    "__file__",
    "__import__",
    "__loader__",
    "__name__",
    "__package__",
    "__spec__",
    "abs",
    "aiter",
    "all",
    "anext",
    "any",
    "ascii",
    "bin",
    "bool",
    "breakpoint",
    "bytearray",
    "bytes",
    "callable",
    "chr",
    "classmethod",
    "compile",
    "complex",
    "copyright",
    "credits",
    "delattr",
    "dict",
    "dir",
    "divmod",
    "enumerate",
    "eval",
    "exec",
    "exit",
    "filter",
    "float",
    "format",
    "frozenset",
    "getattr",
    "globals",
    "hasattr",
    "hash",
    "help",
    "hex",
    "id",
    "input",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "license",
    "list",
    "locals",
    "map",
    "max",
    "memoryview",
    "min",
    "next",
    "object",
    "oct",
    "open",
    "ord",
    "pow",
    "print",
    "property",
    "quit",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "type",
    "vars",
    "zip",
];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.binary_search(&name).is_ok()
}

/// Names read by `block` before anything in it binds them.
pub fn free_names(block: &[Stmt]) -> BTreeSet<String> {
    let mut flow = Flow::default();
    flow.block(block);
    flow.finish()
}

/// Free names of a single statement.
pub fn stmt_free_names(stmt: &Stmt) -> BTreeSet<String> {
    free_names(std::slice::from_ref(stmt))
}

/// Free names of an expression evaluated on its own.
pub fn expr_free_names(expr: &Expr) -> BTreeSet<String> {
    let mut flow = Flow::default();
    flow.expr(expr);
    flow.finish()
}

/// Names `stmt` binds in the scope it appears in. Compound statements
/// contribute the bindings of their bodies; function and class bodies do not.
pub fn bound_names(stmt: &Stmt) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_bindings(std::slice::from_ref(stmt), &mut out);
    out
}

/// True when `stmt` is `from ... import *`.
pub fn is_star_import(stmt: &Stmt) -> bool {
    matches!(stmt, Stmt::ImportFrom(s) if s.names.iter().any(|a| a.name.as_str() == "*"))
}

fn collect_bindings(block: &[Stmt], out: &mut BTreeSet<String>) {
    for stmt in block {
        match stmt {
            Stmt::FunctionDef(s) => {
                out.insert(s.name.to_string());
                continue;
            }
            Stmt::AsyncFunctionDef(s) => {
                out.insert(s.name.to_string());
                continue;
            }
            Stmt::ClassDef(s) => {
                out.insert(s.name.to_string());
                continue;
            }
            Stmt::Import(s) => {
                out.extend(s.names.iter().map(import_binding));
            }
            Stmt::ImportFrom(s) => {
                out.extend(
                    s.names
                        .iter()
                        .filter(|a| a.name.as_str() != "*")
                        .map(import_binding),
                );
            }
            Stmt::Try(s) => handler_names(&s.handlers, out),
            Stmt::TryStar(s) => handler_names(&s.handlers, out),
            Stmt::Match(s) => {
                for case in &s.cases {
                    pattern_bindings(&case.pattern, out);
                }
            }
            _ => {}
        }
        for expr in walk::stmt_exprs(stmt) {
            expr_bindings(expr, out);
        }
        for child in walk::child_blocks(stmt) {
            collect_bindings(child, out);
        }
    }
}

fn handler_names(handlers: &[ast::ExceptHandler], out: &mut BTreeSet<String>) {
    for ast::ExceptHandler::ExceptHandler(h) in handlers {
        if let Some(name) = &h.name {
            out.insert(name.to_string());
        }
    }
}

/// Store/Del names and walrus targets within `expr`, not descending into
/// lambdas (their own scope). Comprehension targets are local to the
/// comprehension, but walrus targets inside one leak out.
fn expr_bindings(expr: &Expr, out: &mut BTreeSet<String>) {
    match expr {
        Expr::Name(n) if !matches!(n.ctx, ExprContext::Load) => {
            out.insert(n.id.to_string());
        }
        Expr::Lambda(_) => {}
        Expr::ListComp(_) | Expr::SetComp(_) | Expr::DictComp(_) | Expr::GeneratorExp(_) => {
            walk::walk_expr(expr, &mut |e| {
                if let Expr::NamedExpr(w) = e {
                    if let Expr::Name(n) = w.target.as_ref() {
                        out.insert(n.id.to_string());
                    }
                }
            });
        }
        _ => {
            for child in walk::child_exprs(expr) {
                expr_bindings(child, out);
            }
        }
    }
}

fn pattern_bindings(pattern: &Pattern, out: &mut BTreeSet<String>) {
    match pattern {
        Pattern::MatchValue(_) | Pattern::MatchSingleton(_) => {}
        Pattern::MatchSequence(p) => p.patterns.iter().for_each(|p| pattern_bindings(p, out)),
        Pattern::MatchMapping(p) => {
            p.patterns.iter().for_each(|p| pattern_bindings(p, out));
            if let Some(rest) = &p.rest {
                out.insert(rest.to_string());
            }
        }
        Pattern::MatchClass(p) => p
            .patterns
            .iter()
            .chain(&p.kwd_patterns)
            .for_each(|p| pattern_bindings(p, out)),
        Pattern::MatchStar(p) => {
            if let Some(name) = &p.name {
                out.insert(name.to_string());
            }
        }
        Pattern::MatchAs(p) => {
            if let Some(inner) = &p.pattern {
                pattern_bindings(inner, out);
            }
            if let Some(name) = &p.name {
                out.insert(name.to_string());
            }
        }
        Pattern::MatchOr(p) => p.patterns.iter().for_each(|p| pattern_bindings(p, out)),
    }
}

/// The name an import alias binds: `import a.b` binds `a`.
pub fn import_binding(alias: &ast::Alias) -> String {
    match &alias.asname {
        Some(asname) => asname.to_string(),
        None => alias
            .name
            .as_str()
            .split('.')
            .next()
            .unwrap_or_default()
            .to_string(),
    }
}

#[derive(Default)]
struct Flow {
    bound: HashSet<String>,
    free: BTreeSet<String>,
    /// Reads from nested function bodies, resolved when the block finishes.
    deferred: BTreeSet<String>,
}

impl Flow {
    fn finish(mut self) -> BTreeSet<String> {
        let bound = std::mem::take(&mut self.bound);
        self.free
            .extend(self.deferred.into_iter().filter(|n| !bound.contains(n)));
        self.free
    }

    fn read(&mut self, name: &str) {
        if !self.bound.contains(name) {
            self.free.insert(name.to_string());
        }
    }

    fn bind(&mut self, name: &str) {
        self.bound.insert(name.to_string());
    }

    fn block(&mut self, block: &[Stmt]) {
        for stmt in block {
            self.stmt(stmt);
        }
    }

    /// Runs each block from the same starting state; afterwards a name is
    /// bound if any branch bound it.
    fn branches(&mut self, blocks: &[&[Stmt]]) {
        let start = self.bound.clone();
        let mut union = start.clone();
        for block in blocks {
            self.bound = start.clone();
            self.block(block);
            union.extend(self.bound.drain());
        }
        self.bound = union;
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::FunctionDef(s) => {
                self.definition_header(&s.decorator_list, &s.args, s.returns.as_deref());
                self.bind(&s.name);
                self.function_body(&s.args, &s.body);
            }
            Stmt::AsyncFunctionDef(s) => {
                self.definition_header(&s.decorator_list, &s.args, s.returns.as_deref());
                self.bind(&s.name);
                self.function_body(&s.args, &s.body);
            }
            Stmt::ClassDef(s) => {
                for e in s.decorator_list.iter().chain(&s.bases) {
                    self.expr(e);
                }
                for k in &s.keywords {
                    self.expr(&k.value);
                }
                let mut class = Flow {
                    bound: self.bound.clone(),
                    ..Flow::default()
                };
                class.block(&s.body);
                self.free.extend(class.free);
                // Methods skip the class scope when resolving names.
                self.deferred.extend(class.deferred);
                self.bind(&s.name);
            }
            Stmt::Return(s) => self.opt_expr(s.value.as_deref()),
            Stmt::Delete(s) => {
                for target in &s.targets {
                    self.expr(target);
                }
            }
            Stmt::Assign(s) => {
                self.expr(&s.value);
                for target in &s.targets {
                    self.target(target);
                }
            }
            Stmt::TypeAlias(s) => {
                self.expr(&s.value);
                self.target(&s.name);
            }
            Stmt::AugAssign(s) => {
                if let Expr::Name(n) = s.target.as_ref() {
                    self.read(&n.id);
                }
                self.expr(&s.value);
                self.target(&s.target);
            }
            Stmt::AnnAssign(s) => {
                self.expr(&s.annotation);
                self.opt_expr(s.value.as_deref());
                self.target(&s.target);
            }
            Stmt::For(s) => {
                self.expr(&s.iter);
                self.target(&s.target);
                self.block(&s.body);
                self.block(&s.orelse);
            }
            Stmt::AsyncFor(s) => {
                self.expr(&s.iter);
                self.target(&s.target);
                self.block(&s.body);
                self.block(&s.orelse);
            }
            Stmt::While(s) => {
                self.expr(&s.test);
                self.block(&s.body);
                self.block(&s.orelse);
            }
            Stmt::If(s) => {
                self.expr(&s.test);
                self.branches(&[&s.body, &s.orelse]);
            }
            Stmt::With(s) => {
                self.with_items(&s.items);
                self.block(&s.body);
            }
            Stmt::AsyncWith(s) => {
                self.with_items(&s.items);
                self.block(&s.body);
            }
            Stmt::Match(s) => {
                self.expr(&s.subject);
                let start = self.bound.clone();
                let mut union = start.clone();
                for case in &s.cases {
                    self.bound = start.clone();
                    self.pattern(&case.pattern);
                    self.opt_expr(case.guard.as_deref());
                    self.block(&case.body);
                    union.extend(self.bound.drain());
                }
                self.bound = union;
            }
            Stmt::Raise(s) => {
                self.opt_expr(s.exc.as_deref());
                self.opt_expr(s.cause.as_deref());
            }
            Stmt::Try(s) => self.try_stmt(&s.body, &s.handlers, &s.orelse, &s.finalbody),
            Stmt::TryStar(s) => self.try_stmt(&s.body, &s.handlers, &s.orelse, &s.finalbody),
            Stmt::Assert(s) => {
                self.expr(&s.test);
                self.opt_expr(s.msg.as_deref());
            }
            Stmt::Import(s) => {
                for alias in &s.names {
                    self.bind(&import_binding(alias));
                }
            }
            Stmt::ImportFrom(s) => {
                for alias in s.names.iter().filter(|a| a.name.as_str() != "*") {
                    self.bind(&import_binding(alias));
                }
            }
            Stmt::Global(_) | Stmt::Nonlocal(_) => {}
            Stmt::Expr(s) => self.expr(&s.value),
            Stmt::Pass(_) | Stmt::Break(_) | Stmt::Continue(_) => {}
        }
    }

    fn try_stmt(
        &mut self,
        body: &[Stmt],
        handlers: &[ast::ExceptHandler],
        orelse: &[Stmt],
        finalbody: &[Stmt],
    ) {
        let start = self.bound.clone();
        self.block(body);
        self.block(orelse);
        let mut union = std::mem::take(&mut self.bound);
        for ast::ExceptHandler::ExceptHandler(h) in handlers {
            self.bound = start.clone();
            self.opt_expr(h.type_.as_deref());
            if let Some(name) = &h.name {
                self.bind(name);
            }
            self.block(&h.body);
            union.extend(self.bound.drain());
        }
        self.bound = union;
        self.block(finalbody);
    }

    fn with_items(&mut self, items: &[ast::WithItem]) {
        for item in items {
            self.expr(&item.context_expr);
            if let Some(vars) = &item.optional_vars {
                self.target(vars);
            }
        }
    }

    fn definition_header(
        &mut self,
        decorators: &[Expr],
        args: &ast::Arguments,
        returns: Option<&Expr>,
    ) {
        for d in decorators {
            self.expr(d);
        }
        let mut header = Vec::new();
        walk::arguments_exprs(args, &mut header);
        for e in header {
            self.expr(e);
        }
        self.opt_expr(returns);
    }

    fn function_body(&mut self, args: &ast::Arguments, body: &[Stmt]) {
        let mut locals = BTreeSet::new();
        collect_bindings(body, &mut locals);
        let mut declared_outer = BTreeSet::new();
        walk_scope_stmts(body, &mut |s| match s {
            Stmt::Global(g) => declared_outer.extend(g.names.iter().map(|n| n.to_string())),
            Stmt::Nonlocal(g) => declared_outer.extend(g.names.iter().map(|n| n.to_string())),
            _ => {}
        });
        let mut inner = Flow::default();
        for name in parameter_names(args) {
            inner.bind(&name);
        }
        for name in locals.difference(&declared_outer) {
            inner.bind(name);
        }
        inner.block(body);
        self.deferred.extend(inner.finish());
    }

    fn opt_expr(&mut self, expr: Option<&Expr>) {
        if let Some(expr) = expr {
            self.expr(expr);
        }
    }

    /// Binds the names in an assignment target; attribute and subscript
    /// targets read their bases instead.
    fn target(&mut self, target: &Expr) {
        match target {
            Expr::Name(n) => self.bind(&n.id),
            Expr::Tuple(t) => t.elts.iter().for_each(|e| self.target(e)),
            Expr::List(t) => t.elts.iter().for_each(|e| self.target(e)),
            Expr::Starred(s) => self.target(&s.value),
            Expr::Attribute(a) => self.expr(&a.value),
            Expr::Subscript(s) => {
                self.expr(&s.value);
                self.expr(&s.slice);
            }
            other => self.expr(other),
        }
    }

    fn expr(&mut self, expr: &Expr) {
        match expr {
            Expr::Name(n) => match n.ctx {
                ExprContext::Load | ExprContext::Del => self.read(&n.id),
                ExprContext::Store => self.bind(&n.id),
            },
            Expr::NamedExpr(w) => {
                self.expr(&w.value);
                self.target(&w.target);
            }
            Expr::Lambda(l) => {
                let mut header = Vec::new();
                walk::arguments_exprs(&l.args, &mut header);
                for e in header {
                    self.expr(e);
                }
                let mut inner = Flow::default();
                for name in parameter_names(&l.args) {
                    inner.bind(&name);
                }
                inner.expr(&l.body);
                self.deferred.extend(inner.finish());
            }
            Expr::ListComp(c) => self.comprehension(&[&c.elt], &c.generators),
            Expr::SetComp(c) => self.comprehension(&[&c.elt], &c.generators),
            Expr::GeneratorExp(c) => self.comprehension(&[&c.elt], &c.generators),
            Expr::DictComp(c) => self.comprehension(&[&c.key, &c.value], &c.generators),
            _ => {
                for child in walk::child_exprs(expr) {
                    self.expr(child);
                }
            }
        }
    }

    fn comprehension(&mut self, elts: &[&Expr], generators: &[ast::Comprehension]) {
        let Some(first) = generators.first() else {
            return;
        };
        self.expr(&first.iter);
        let outer = self.bound.clone();
        let mut leaked = BTreeSet::new();
        for (i, generator) in generators.iter().enumerate() {
            if i > 0 {
                self.expr(&generator.iter);
            }
            self.target(&generator.target);
            for cond in &generator.ifs {
                self.expr(cond);
                collect_walrus(cond, &mut leaked);
            }
        }
        for elt in elts {
            self.expr(elt);
            collect_walrus(elt, &mut leaked);
        }
        self.bound = outer;
        for name in leaked {
            self.bind(&name);
        }
    }

    fn pattern(&mut self, pattern: &Pattern) {
        let mut exprs = Vec::new();
        walk::pattern_exprs(pattern, &mut exprs);
        for e in exprs {
            self.expr(e);
        }
        let mut names = BTreeSet::new();
        pattern_bindings(pattern, &mut names);
        for name in names {
            self.bind(&name);
        }
    }
}

fn collect_walrus(expr: &Expr, out: &mut BTreeSet<String>) {
    walk::walk_expr(expr, &mut |e| {
        if let Expr::NamedExpr(w) = e {
            if let Expr::Name(n) = w.target.as_ref() {
                out.insert(n.id.to_string());
            }
        }
    });
}

fn parameter_names(args: &ast::Arguments) -> Vec<String> {
    args.posonlyargs
        .iter()
        .chain(&args.args)
        .chain(&args.kwonlyargs)
        .map(|a| a.def.arg.to_string())
        .chain(args.vararg.iter().map(|a| a.arg.to_string()))
        .chain(args.kwarg.iter().map(|a| a.arg.to_string()))
        .collect()
}

/// Statements of one function scope: nested blocks, but not nested
/// function or class bodies.
fn walk_scope_stmts<'a>(block: &'a [Stmt], visit: &mut impl FnMut(&'a Stmt)) {
    for stmt in block {
        visit(stmt);
        if matches!(
            stmt,
            Stmt::FunctionDef(_) | Stmt::AsyncFunctionDef(_) | Stmt::ClassDef(_)
        ) {
            continue;
        }
        for child in walk::child_blocks(stmt) {
            walk_scope_stmts(child, visit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustpython_parser::Parse;

    fn free(src: &str) -> Vec<String> {
        let suite = ast::Suite::parse(src, "<test>").unwrap();
        free_names(&suite).into_iter().collect()
    }

    fn bound(src: &str) -> Vec<String> {
        let suite = ast::Suite::parse(src, "<test>").unwrap();
        bound_names(&suite[0]).into_iter().collect()
    }

    #[test]
    fn builtins_sorted_for_binary_search() {
        let mut sorted = BUILTINS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, BUILTINS);
        assert!(is_builtin("print") && is_builtin("__name__") && !is_builtin("re"));
    }

    #[test]
    fn assignment_reads_before_binding() {
        assert_eq!(free("m = re.match('x', name)"), vec!["name", "re"]);
        assert_eq!(free("x = x + 1"), vec!["x"]);
        assert_eq!(free("name = 'a'\nm = re.match('x', name)"), vec!["re"]);
    }

    #[test]
    fn function_bodies_are_deferred() {
        assert_eq!(free("def f(a):\n    return g(a) + b\n"), vec!["b", "g"]);
        assert_eq!(
            free("def f():\n    return g()\ndef g():\n    return 1\n"),
            Vec::<String>::new()
        );
        assert_eq!(
            free("def f(n):\n    return f(n - 1)\n"),
            Vec::<String>::new()
        );
        assert_eq!(
            free("def f():\n    global counter\n    counter = counter + 1\n"),
            vec!["counter"]
        );
    }

    #[test]
    fn comprehension_scopes() {
        assert_eq!(free("ys = [x * k for x in xs if x]"), vec!["k", "xs"]);
        assert_eq!(free("[y := x for x in xs]\nz = y"), vec!["xs"]);
        assert_eq!(free("f = lambda a, b=d: a + c"), vec!["c", "d"]);
    }

    #[test]
    fn class_bodies_and_methods() {
        let src = "class A(Base):\n    k = 1\n    j = k + 1\n    def m(self):\n        return k\n";
        assert_eq!(free(src), vec!["Base", "k"]);
    }

    #[test]
    fn branches_join() {
        assert_eq!(free("if c:\n    x = 1\nelse:\n    y = x\n"), vec!["c", "x"]);
        assert_eq!(
            free("try:\n    import a\nexcept E as e:\n    print(e)\n"),
            vec!["E", "print"]
        );
    }

    #[test]
    fn match_statement_bindings() {
        let src = "match p:\n    case Point(x=0, y=yy):\n        r = yy\n    case [a, *rest]:\n        r = rest\n";
        assert_eq!(free(src), vec!["Point", "p"]);
    }

    #[test]
    fn bindings_of_statements() {
        assert_eq!(bound("import os.path, re as regex"), vec!["os", "regex"]);
        assert_eq!(bound("from a import b, c as d"), vec!["b", "d"]);
        assert_eq!(bound("a, (b, *c) = t"), vec!["a", "b", "c"]);
        assert_eq!(bound("for i in r:\n    j = i\n"), vec!["i", "j"]);
        assert_eq!(bound("def f():\n    inner = 1\n"), vec!["f"]);
        assert_eq!(bound("x.y = 1"), Vec::<String>::new());
        assert_eq!(bound("if (n := 10) > 5:\n    pass\n"), vec!["n"]);
    }

    #[test]
    fn star_import_detection() {
        let suite = ast::Suite::parse("from os import *\nfrom os import path\n", "<t>").unwrap();
        assert!(is_star_import(&suite[0]));
        assert!(!is_star_import(&suite[1]));
    }
}
