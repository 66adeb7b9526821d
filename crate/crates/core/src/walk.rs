//! Borrowing traversal helpers over the Python syntax tree.

use rustpython_parser::ast::{self, Expr, Pattern, Stmt};

/// Statement lists nested directly inside `stmt`.
pub fn child_blocks(stmt: &Stmt) -> Vec<&[Stmt]> {
    match stmt {
        Stmt::FunctionDef(s) => vec![&s.body],
        Stmt::AsyncFunctionDef(s) => vec![&s.body],
        Stmt::ClassDef(s) => vec![&s.body],
        Stmt::For(s) => vec![&s.body, &s.orelse],
        Stmt::AsyncFor(s) => vec![&s.body, &s.orelse],
        Stmt::While(s) => vec![&s.body, &s.orelse],
        Stmt::If(s) => vec![&s.body, &s.orelse],
        Stmt::With(s) => vec![&s.body],
        Stmt::AsyncWith(s) => vec![&s.body],
        Stmt::Match(s) => s.cases.iter().map(|c| c.body.as_slice()).collect(),
        Stmt::Try(s) => try_blocks(&s.body, &s.handlers, &s.orelse, &s.finalbody),
        Stmt::TryStar(s) => try_blocks(&s.body, &s.handlers, &s.orelse, &s.finalbody),
        _ => Vec::new(),
    }
}

fn try_blocks<'a>(
    body: &'a [Stmt],
    handlers: &'a [ast::ExceptHandler],
    orelse: &'a [Stmt],
    finalbody: &'a [Stmt],
) -> Vec<&'a [Stmt]> {
    let mut blocks = vec![body];
    for ast::ExceptHandler::ExceptHandler(h) in handlers {
        blocks.push(&h.body);
    }
    blocks.push(orelse);
    blocks.push(finalbody);
    blocks
}

/// Expressions that belong to `stmt` itself, excluding those inside nested
/// statement lists.
pub fn stmt_exprs(stmt: &Stmt) -> Vec<&Expr> {
    let mut out: Vec<&Expr> = Vec::new();
    match stmt {
        Stmt::FunctionDef(s) => {
            out.extend(&s.decorator_list);
            arguments_exprs(&s.args, &mut out);
            out.extend(s.returns.as_deref());
        }
        Stmt::AsyncFunctionDef(s) => {
            out.extend(&s.decorator_list);
            arguments_exprs(&s.args, &mut out);
            out.extend(s.returns.as_deref());
        }
        Stmt::ClassDef(s) => {
            out.extend(&s.decorator_list);
            out.extend(&s.bases);
            out.extend(s.keywords.iter().map(|k| &k.value));
        }
        Stmt::Return(s) => out.extend(s.value.as_deref()),
        Stmt::Delete(s) => out.extend(&s.targets),
        Stmt::Assign(s) => {
            out.extend(&s.targets);
            out.push(&s.value);
        }
        Stmt::TypeAlias(s) => {
            out.push(&s.name);
            out.push(&s.value);
        }
        Stmt::AugAssign(s) => {
            out.push(&s.target);
            out.push(&s.value);
        }
        Stmt::AnnAssign(s) => {
            out.push(&s.target);
            out.push(&s.annotation);
            out.extend(s.value.as_deref());
        }
        Stmt::For(s) => {
            out.push(&s.target);
            out.push(&s.iter);
        }
        Stmt::AsyncFor(s) => {
            out.push(&s.target);
            out.push(&s.iter);
        }
        Stmt::While(s) => out.push(&s.test),
        Stmt::If(s) => out.push(&s.test),
        Stmt::With(s) => with_items_exprs(&s.items, &mut out),
        Stmt::AsyncWith(s) => with_items_exprs(&s.items, &mut out),
        Stmt::Match(s) => {
            out.push(&s.subject);
            for case in &s.cases {
                pattern_exprs(&case.pattern, &mut out);
                out.extend(case.guard.as_deref());
            }
        }
        Stmt::Raise(s) => {
            out.extend(s.exc.as_deref());
            out.extend(s.cause.as_deref());
        }
        Stmt::Try(s) => handler_exprs(&s.handlers, &mut out),
        Stmt::TryStar(s) => handler_exprs(&s.handlers, &mut out),
        Stmt::Assert(s) => {
            out.push(&s.test);
            out.extend(s.msg.as_deref());
        }
        Stmt::Expr(s) => out.push(&s.value),
        Stmt::Import(_)
        | Stmt::ImportFrom(_)
        | Stmt::Global(_)
        | Stmt::Nonlocal(_)
        | Stmt::Pass(_)
        | Stmt::Break(_)
        | Stmt::Continue(_) => {}
    }
    out
}

fn with_items_exprs<'a>(items: &'a [ast::WithItem], out: &mut Vec<&'a Expr>) {
    for item in items {
        out.push(&item.context_expr);
        out.extend(item.optional_vars.as_deref());
    }
}

fn handler_exprs<'a>(handlers: &'a [ast::ExceptHandler], out: &mut Vec<&'a Expr>) {
    for ast::ExceptHandler::ExceptHandler(h) in handlers {
        out.extend(h.type_.as_deref());
    }
}

pub(crate) fn arguments_exprs<'a>(args: &'a ast::Arguments, out: &mut Vec<&'a Expr>) {
    for arg in args
        .posonlyargs
        .iter()
        .chain(&args.args)
        .chain(&args.kwonlyargs)
    {
        out.extend(arg.default.as_deref());
        out.extend(arg.def.annotation.as_deref());
    }
    for arg in args.vararg.iter().chain(&args.kwarg) {
        out.extend(arg.annotation.as_deref());
    }
}

pub(crate) fn pattern_exprs<'a>(pattern: &'a Pattern, out: &mut Vec<&'a Expr>) {
    match pattern {
        Pattern::MatchValue(p) => out.push(&p.value),
        Pattern::MatchSingleton(_) | Pattern::MatchStar(_) => {}
        Pattern::MatchSequence(p) => p.patterns.iter().for_each(|p| pattern_exprs(p, out)),
        Pattern::MatchMapping(p) => {
            out.extend(&p.keys);
            p.patterns.iter().for_each(|p| pattern_exprs(p, out));
        }
        Pattern::MatchClass(p) => {
            out.push(&p.cls);
            p.patterns
                .iter()
                .chain(&p.kwd_patterns)
                .for_each(|p| pattern_exprs(p, out));
        }
        Pattern::MatchAs(p) => {
            if let Some(p) = &p.pattern {
                pattern_exprs(p, out);
            }
        }
        Pattern::MatchOr(p) => p.patterns.iter().for_each(|p| pattern_exprs(p, out)),
    }
}

/// Direct sub-expressions of `expr`.
pub fn child_exprs(expr: &Expr) -> Vec<&Expr> {
    let mut out: Vec<&Expr> = Vec::new();
    match expr {
        Expr::BoolOp(e) => out.extend(&e.values),
        Expr::NamedExpr(e) => {
            out.push(&e.target);
            out.push(&e.value);
        }
        Expr::BinOp(e) => {
            out.push(&e.left);
            out.push(&e.right);
        }
        Expr::UnaryOp(e) => out.push(&e.operand),
        Expr::Lambda(e) => {
            arguments_exprs(&e.args, &mut out);
            out.push(&e.body);
        }
        Expr::IfExp(e) => {
            out.push(&e.test);
            out.push(&e.body);
            out.push(&e.orelse);
        }
        Expr::Dict(e) => {
            out.extend(e.keys.iter().flatten());
            out.extend(&e.values);
        }
        Expr::Set(e) => out.extend(&e.elts),
        Expr::ListComp(e) => {
            out.push(&e.elt);
            comprehension_exprs(&e.generators, &mut out);
        }
        Expr::SetComp(e) => {
            out.push(&e.elt);
            comprehension_exprs(&e.generators, &mut out);
        }
        Expr::DictComp(e) => {
            out.push(&e.key);
            out.push(&e.value);
            comprehension_exprs(&e.generators, &mut out);
        }
        Expr::GeneratorExp(e) => {
            out.push(&e.elt);
            comprehension_exprs(&e.generators, &mut out);
        }
        Expr::Await(e) => out.push(&e.value),
        Expr::Yield(e) => out.extend(e.value.as_deref()),
        Expr::YieldFrom(e) => out.push(&e.value),
        Expr::Compare(e) => {
            out.push(&e.left);
            out.extend(&e.comparators);
        }
        Expr::Call(e) => {
            out.push(&e.func);
            out.extend(&e.args);
            out.extend(e.keywords.iter().map(|k| &k.value));
        }
        Expr::FormattedValue(e) => {
            out.push(&e.value);
            out.extend(e.format_spec.as_deref());
        }
        Expr::JoinedStr(e) => out.extend(&e.values),
        Expr::Constant(_) | Expr::Name(_) => {}
        Expr::Attribute(e) => out.push(&e.value),
        Expr::Subscript(e) => {
            out.push(&e.value);
            out.push(&e.slice);
        }
        Expr::Starred(e) => out.push(&e.value),
        Expr::List(e) => out.extend(&e.elts),
        Expr::Tuple(e) => out.extend(&e.elts),
        Expr::Slice(e) => {
            out.extend(e.lower.as_deref());
            out.extend(e.upper.as_deref());
            out.extend(e.step.as_deref());
        }
    }
    out
}

fn comprehension_exprs<'a>(generators: &'a [ast::Comprehension], out: &mut Vec<&'a Expr>) {
    for generator in generators {
        out.push(&generator.target);
        out.push(&generator.iter);
        out.extend(&generator.ifs);
    }
}

/// Pre-order visit of `expr` and every expression below it.
pub fn walk_expr<'a>(expr: &'a Expr, visit: &mut impl FnMut(&'a Expr)) {
    visit(expr);
    for child in child_exprs(expr) {
        walk_expr(child, visit);
    }
}

/// Pre-order visit of every statement in `block`, recursing into nested blocks.
pub fn walk_stmts<'a>(block: &'a [Stmt], visit: &mut impl FnMut(&'a Stmt)) {
    for stmt in block {
        visit(stmt);
        for child in child_blocks(stmt) {
            walk_stmts(child, visit);
        }
    }
}

/// Every expression anywhere under `stmt`, nested blocks included.
pub fn walk_stmt_exprs<'a>(stmt: &'a Stmt, visit: &mut impl FnMut(&'a Expr)) {
    walk_stmts(std::slice::from_ref(stmt), &mut |s| {
        for expr in stmt_exprs(s) {
            walk_expr(expr, visit);
        }
    });
}
