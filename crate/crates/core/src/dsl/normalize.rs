//! Canonical form for boolean expressions.
//!
//! * `imp(a, b)` becomes `!a || b`;
//! * negations are pushed down to atoms (comparisons flip, quantifiers dualize), so `!`
//!   survives only directly above boolean variables;
//! * `>` / `>=` are rewritten to `<` / `<=` with swapped operands, and the operands of
//!   `==` / `!=` are ordered structurally;
//! * `&&` / `||` chains are flattened, constant-folded, sorted by [`Expr::structural_cmp`],
//!   deduplicated and rebuilt right-nested.
//!
//! Every step preserves the three-valued evaluation result exactly, including the reason
//! carried by an undefined result.

use super::ast::*;

/// Canonical form of a typechecked boolean expression.
pub fn normalize(e: &Expr) -> Expr {
    nnf(e, true)
}

fn boolean(kind: ExprKind, span: Span) -> Expr {
    Expr::typed(kind, Type::Bool, span)
}

fn nnf(e: &Expr, positive: bool) -> Expr {
    match &e.kind {
        ExprKind::Bool(b) => boolean(ExprKind::Bool(*b == positive), e.span),
        ExprKind::Unary(UnOp::Not, inner) => nnf(inner, !positive),
        ExprKind::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            let conj = (*op == BinOp::And) == positive;
            let op = if conj { BinOp::And } else { BinOp::Or };
            junction(op, vec![nnf(l, positive), nnf(r, positive)], e.span)
        }
        ExprKind::Imp(a, c) => {
            if positive {
                junction(BinOp::Or, vec![nnf(a, false), nnf(c, true)], e.span)
            } else {
                junction(BinOp::And, vec![nnf(a, true), nnf(c, false)], e.span)
            }
        }
        ExprKind::Binary(op, l, r) => {
            let op = if positive { *op } else { op.negated().expect("boolean atom operator") };
            atom(op, term(l), term(r), e.span)
        }
        ExprKind::Quant { kind, array, binder, body } => boolean(
            ExprKind::Quant {
                kind: if positive { *kind } else { kind.dual() },
                array: Box::new(term(array)),
                binder: binder.clone(),
                body: Box::new(nnf(body, positive)),
            },
            e.span,
        ),
        ExprKind::Var(_) if positive => e.clone(),
        ExprKind::Var(_) => boolean(ExprKind::Unary(UnOp::Not, Box::new(e.clone())), e.span),
        ExprKind::Int(_)
        | ExprKind::Real(_)
        | ExprKind::Null
        | ExprKind::Unary(UnOp::Neg, _)
        | ExprKind::Length(_)
        | ExprKind::Index(..) => panic!("normalize expects a boolean expression, got {e:?}"),
    }
}

/// Normalizes boolean sub-expressions nested inside a non-connective position.
fn term(e: &Expr) -> Expr {
    if e.ty == Some(Type::Bool) {
        return nnf(e, true);
    }
    e.clone()
}

fn atom(op: BinOp, l: Expr, r: Expr, span: Span) -> Expr {
    let (op, l, r) = match op {
        BinOp::Gt => (BinOp::Lt, r, l),
        BinOp::Ge => (BinOp::Le, r, l),
        BinOp::Eq | BinOp::Neq if r < l => (op, r, l),
        _ => (op, l, r),
    };
    boolean(ExprKind::Binary(op, Box::new(l), Box::new(r)), span)
}

fn junction(op: BinOp, operands: Vec<Expr>, span: Span) -> Expr {
    let unit = op == BinOp::And;
    let mut flat = Vec::new();
    for o in operands {
        flatten(op, o, &mut flat);
    }
    if flat.iter().any(|o| o.is_bool_lit(!unit)) {
        return boolean(ExprKind::Bool(!unit), span);
    }
    flat.retain(|o| !o.is_bool_lit(unit));
    flat.sort();
    flat.dedup();
    match flat.pop() {
        None => boolean(ExprKind::Bool(unit), span),
        Some(last) => flat
            .into_iter()
            .rev()
            .fold(last, |acc, o| boolean(ExprKind::Binary(op, Box::new(o), Box::new(acc)), span)),
    }
}

fn flatten(op: BinOp, e: Expr, out: &mut Vec<Expr>) {
    match e.kind {
        ExprKind::Binary(o, l, r) if o == op => {
            flatten(op, *l, out);
            flatten(op, *r, out);
        }
        _ => out.push(e),
    }
}

/// Top-level conjuncts of an expression (the expression itself if it is not a conjunction).
pub fn conjuncts(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    flatten(BinOp::And, e.clone(), &mut out);
    out
}
