//! Source rendering that parses back to the same tree.

use std::fmt::Write;

use super::ast::*;

const ATOM: u8 = 9;
const POSTFIX: u8 = 8;
const PREFIX: u8 = 7;

fn binary_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Neq => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
    }
}

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => binary_prec(*op),
        ExprKind::Unary(..) => PREFIX,
        ExprKind::Length(_) | ExprKind::Index(..) => POSTFIX,
        _ => ATOM,
    }
}

pub fn pretty(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

pub fn pretty_spec(spec: &Specification) -> String {
    let mut out = format!("{}\n", spec.signature);
    for (kw, clauses) in [("pre", &spec.pres), ("post", &spec.posts)] {
        for c in clauses {
            let _ = writeln!(out, "{kw}({});", pretty(c));
        }
    }
    out
}

fn real_literal(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let p = prec(e);
    if p < min {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Real(v) => out.push_str(&real_literal(*v)),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Null => out.push_str("null"),
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Unary(UnOp::Not, c) => {
            out.push('!');
            write_expr(out, c, PREFIX);
        }
        ExprKind::Unary(UnOp::Neg, c) => {
            // Always parenthesized so `-(5)` is not read back as the literal `-5`.
            out.push_str("-(");
            write_expr(out, c, 0);
            out.push(')');
        }
        ExprKind::Binary(op, l, r) => {
            let bp = binary_prec(*op);
            write_expr(out, l, bp);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, bp + 1);
        }
        ExprKind::Imp(a, c) => {
            out.push_str("imp(");
            write_expr(out, a, 0);
            out.push_str(", ");
            write_expr(out, c, 0);
            out.push(')');
        }
        ExprKind::Length(a) => {
            write_expr(out, a, POSTFIX);
            out.push_str(".length");
        }
        ExprKind::Index(a, i) => {
            write_expr(out, a, POSTFIX);
            out.push('[');
            write_expr(out, i, 0);
            out.push(']');
        }
        ExprKind::Quant { kind, array, binder, body } => {
            let _ = write!(out, "{}(", kind.keyword());
            write_expr(out, array, 0);
            let _ = write!(out, ", {binder} -> ");
            write_expr(out, body, 0);
            out.push(')');
        }
    }
    if p < min {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::{parse, parse_expr};

    #[test]
    fn minimal_parentheses() {
        for src in [
            "a || b && c",
            "(a || b) && c",
            "x - (y - z)",
            "x - y - z",
            "!(x < y)",
            "a[i + 1].length * -3",
            "-(x) + 2",
            "imp(p, forall(a, i -> a[i] == 0.5))",
            "1e-10 < x",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(pretty(&e), src);
        }
    }

    #[test]
    fn spec_round_trip() {
        let src = "method getMax(a: int[]) -> int;\npre(a != null);\npre(a.length > 0);\n\
                   post(exists(a, i -> a[i] == retval));\npost(forall(a, i -> a[i] <= retval));\n";
        let spec = parse(src).unwrap();
        assert_eq!(pretty_spec(&spec), src);
    }

    #[test]
    fn literal_edge_cases() {
        for e in [Expr::int(i64::MIN), Expr::new(ExprKind::Real(-0.0)), Expr::new(ExprKind::Real(100.0))] {
            let printed = pretty(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{printed}");
        }
        let neg = Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(Expr::int(5))));
        assert_eq!(parse_expr(&pretty(&neg)).unwrap(), neg);
    }
}
