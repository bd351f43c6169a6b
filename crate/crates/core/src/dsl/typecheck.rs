//! Type resolution. Every node of a checked tree carries `ty: Some(..)`.
//!
//! Equality between operands with no coercion path (e.g. `int == int[]`) is not an error:
//! `==` folds to `false` and `!=` to `true`, keeping the span of the original comparison.

use super::ast::*;
use super::diag::{Diagnostic, DiagnosticKind, Diagnostics};

/// Typechecks every clause of `spec` against its own signature.
pub fn typecheck(spec: &Specification) -> Result<Specification, Diagnostics> {
    let mut cx = Checker { sig: &spec.signature, diags: Vec::new() };
    let pres: Vec<Expr> = spec.pres.iter().filter_map(|e| cx.clause(e, false)).collect();
    let posts: Vec<Expr> = spec.posts.iter().filter_map(|e| cx.clause(e, true)).collect();
    if cx.diags.is_empty() {
        Ok(Specification { signature: spec.signature.clone(), pres, posts })
    } else {
        cx.diags.sort_by_key(|d| d.span.start);
        Err(Diagnostics(cx.diags))
    }
}

/// Typechecks one boolean clause. `in_post` controls whether `retval` is in scope.
pub fn typecheck_clause(e: &Expr, sig: &Signature, in_post: bool) -> Result<Expr, Diagnostics> {
    let mut cx = Checker { sig, diags: Vec::new() };
    match cx.clause(e, in_post) {
        Some(e) if cx.diags.is_empty() => Ok(e),
        _ => Err(Diagnostics(cx.diags)),
    }
}

/// Parses and typechecks in one step.
pub fn parse_checked(src: &str) -> Result<Specification, Diagnostics> {
    typecheck(&super::parser::parse(src)?)
}

struct Checker<'a> {
    sig: &'a Signature,
    diags: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn clause(&mut self, e: &Expr, in_post: bool) -> Option<Expr> {
        let mut scope = Vec::new();
        let typed = self.expr(e, in_post, &mut scope)?;
        if typed.ty != Some(Type::Bool) {
            let ty = typed.ty.as_ref().map(|t| t.to_string()).unwrap_or_default();
            let which = if in_post { "post" } else { "pre" };
            self.err(e.span, format!("{which}-condition must be a boolean expression, found `{ty}`"));
            return None;
        }
        Some(typed)
    }

    fn err(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::type_error(span, msg));
    }

    fn expr(&mut self, e: &Expr, in_post: bool, scope: &mut Vec<(String, Type)>) -> Option<Expr> {
        let span = e.span;
        let done = |kind: ExprKind, ty: Type| Some(Expr::typed(kind, ty, span));
        match &e.kind {
            ExprKind::Int(v) => done(ExprKind::Int(*v), Type::Int),
            ExprKind::Real(v) => done(ExprKind::Real(*v), Type::Double),
            ExprKind::Bool(b) => done(ExprKind::Bool(*b), Type::Bool),
            ExprKind::Null => {
                self.err(span, "`null` may only be compared (== / !=) with an array");
                None
            }
            ExprKind::Var(name) => {
                if let Some((_, t)) = scope.iter().rev().find(|(n, _)| n == name) {
                    return done(ExprKind::Var(name.clone()), t.clone());
                }
                if let Some(p) = self.sig.param(name) {
                    return done(ExprKind::Var(name.clone()), p.ty.clone());
                }
                if name == RETVAL {
                    if !in_post {
                        self.diags.push(Diagnostic::new(
                            DiagnosticKind::RetvalInPre,
                            span,
                            "retval not available in pre-condition",
                        ));
                        return None;
                    }
                    return match &self.sig.returns {
                        Some(t) => done(ExprKind::Var(name.clone()), t.clone()),
                        None => {
                            self.err(span, format!("retval not available: `{}` returns void", self.sig.method));
                            None
                        }
                    };
                }
                self.diags.push(Diagnostic::new(
                    DiagnosticKind::UnknownVariable,
                    span,
                    format!("unknown variable `{name}`"),
                ));
                None
            }
            ExprKind::Unary(op, inner) => {
                let c = self.expr(inner, in_post, scope)?;
                let ct = c.ty.clone()?;
                match op {
                    UnOp::Not if ct == Type::Bool => done(ExprKind::Unary(UnOp::Not, Box::new(c)), Type::Bool),
                    UnOp::Neg if ct.is_numeric() => {
                        let t = Type::promote(&ct, &ct)?;
                        done(ExprKind::Unary(UnOp::Neg, Box::new(c)), t)
                    }
                    UnOp::Not => {
                        self.err(span, format!("`!` expects bool, found `{ct}`"));
                        None
                    }
                    UnOp::Neg => {
                        self.err(span, format!("unary `-` expects a number, found `{ct}`"));
                        None
                    }
                }
            }
            ExprKind::Binary(op, l, r) if op.is_equality() => self.equality(*op, l, r, span, in_post, scope),
            ExprKind::Binary(op, l, r) => {
                let (lc, rc) = (self.expr(l, in_post, scope), self.expr(r, in_post, scope));
                let (lc, rc) = (lc?, rc?);
                let (lt, rt) = (lc.ty.clone()?, rc.ty.clone()?);
                let kind = ExprKind::Binary(*op, Box::new(lc), Box::new(rc));
                if op.is_connective() {
                    if lt == Type::Bool && rt == Type::Bool {
                        return done(kind, Type::Bool);
                    }
                    self.err(span, format!("`{}` expects bool operands, found `{lt}` and `{rt}`", op.symbol()));
                    return None;
                }
                if lt.is_numeric() && rt.is_numeric() {
                    let t = if op.is_comparison() { Type::Bool } else { Type::promote(&lt, &rt)? };
                    return done(kind, t);
                }
                self.err(span, format!("`{}` expects numeric operands, found `{lt}` and `{rt}`", op.symbol()));
                None
            }
            ExprKind::Imp(a, c) => {
                let (ac, cc) = (self.expr(a, in_post, scope), self.expr(c, in_post, scope));
                let (ac, cc) = (ac?, cc?);
                if ac.ty == Some(Type::Bool) && cc.ty == Some(Type::Bool) {
                    return done(ExprKind::Imp(Box::new(ac), Box::new(cc)), Type::Bool);
                }
                self.err(span, "`imp` expects two boolean arguments");
                None
            }
            ExprKind::Length(arr) => {
                let ac = self.expr(arr, in_post, scope)?;
                if ac.ty.as_ref().is_some_and(Type::is_array) {
                    return done(ExprKind::Length(Box::new(ac)), Type::Int);
                }
                self.err(span, format!("`.length` applies to arrays, found `{}`", ac.ty.unwrap_or(Type::Bool)));
                None
            }
            ExprKind::Index(arr, idx) => {
                let (ac, ic) = (self.expr(arr, in_post, scope), self.expr(idx, in_post, scope));
                let (ac, ic) = (ac?, ic?);
                let Some(elem) = ac.ty.as_ref().and_then(Type::element).cloned() else {
                    self.err(arr.span, format!("cannot index a value of type `{}`", ac.ty.unwrap_or(Type::Bool)));
                    return None;
                };
                if !ic.ty.as_ref().is_some_and(Type::is_integral) {
                    self.err(idx.span, format!("array index must be an integer, found `{}`", ic.ty.unwrap_or(Type::Bool)));
                    return None;
                }
                done(ExprKind::Index(Box::new(ac), Box::new(ic)), elem)
            }
            ExprKind::Quant { kind, array, binder, body } => {
                let ac = self.expr(array, in_post, scope);
                scope.push((binder.clone(), Type::Int));
                let bc = self.expr(body, in_post, scope);
                scope.pop();
                let (ac, bc) = (ac?, bc?);
                if !ac.ty.as_ref().is_some_and(Type::is_array) {
                    self.err(array.span, format!("`{}` ranges over an array, found `{}`", kind.keyword(), ac.ty.unwrap_or(Type::Bool)));
                    return None;
                }
                if bc.ty != Some(Type::Bool) {
                    self.err(body.span, format!("`{}` body must be boolean", kind.keyword()));
                    return None;
                }
                done(
                    ExprKind::Quant { kind: *kind, array: Box::new(ac), binder: binder.clone(), body: Box::new(bc) },
                    Type::Bool,
                )
            }
        }
    }

    fn equality(
        &mut self,
        op: BinOp,
        l: &Expr,
        r: &Expr,
        span: Span,
        in_post: bool,
        scope: &mut Vec<(String, Type)>,
    ) -> Option<Expr> {
        let is_null = |e: &Expr| matches!(e.kind, ExprKind::Null);
        let build = |lc: Expr, rc: Expr| Some(Expr::typed(ExprKind::Binary(op, Box::new(lc), Box::new(rc)), Type::Bool, span));
        match (is_null(l), is_null(r)) {
            (true, true) => {
                self.err(span, "comparing `null` with `null`; one side must be an array");
                None
            }
            (true, false) | (false, true) => {
                let (other, null_span, null_left) = if is_null(l) { (r, l.span, true) } else { (l, r.span, false) };
                let oc = self.expr(other, in_post, scope)?;
                let ot = oc.ty.clone()?;
                if !ot.is_array() {
                    self.err(span, format!("`null` can only be compared with an array, found `{ot}`"));
                    return None;
                }
                let nc = Expr::typed(ExprKind::Null, ot, null_span);
                if null_left { build(nc, oc) } else { build(oc, nc) }
            }
            (false, false) => {
                let (lc, rc) = (self.expr(l, in_post, scope), self.expr(r, in_post, scope));
                let (lc, rc) = (lc?, rc?);
                let (lt, rt) = (lc.ty.clone()?, rc.ty.clone()?);
                if (lt.is_numeric() && rt.is_numeric()) || lt == rt {
                    build(lc, rc)
                } else {
                    Some(Expr::typed(ExprKind::Bool(op == BinOp::Neq), Type::Bool, span))
                }
            }
        }
    }
}
