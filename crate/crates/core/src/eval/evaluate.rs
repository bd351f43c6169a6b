//! Three-valued evaluation with bounded quantifiers.
//!
//! `&&`, `||` and the quantifiers follow Kleene's strong logic: a definite `false`
//! conjunct (or `true` disjunct) decides the result even when the other side is undefined.
//! Undefined results carry the least [`UndefReason`] among their undefined inputs, so the
//! outcome does not depend on operand order.

use serde::{Deserialize, Serialize};

use super::config::EvalConfig;
use super::value::{Assignment, Value};
use crate::dsl::{BinOp, Expr, ExprKind, QuantKind, Type, UnOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum UndefReason {
    NullDeref,
    IndexOob,
    DivByZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EvalResult {
    True,
    False,
    Undefined(UndefReason),
    /// A quantifier was cut off at `quant_bound` before its result was settled.
    Approx(bool),
}

impl EvalResult {
    pub fn from_bool(b: bool) -> EvalResult {
        if b { EvalResult::True } else { EvalResult::False }
    }

    /// Boolean reading with undefined taken as `false`.
    pub fn holds(self) -> bool {
        matches!(self, EvalResult::True | EvalResult::Approx(true))
    }

    pub fn is_undefined(self) -> bool {
        matches!(self, EvalResult::Undefined(_))
    }

    pub fn is_approx(self) -> bool {
        matches!(self, EvalResult::Approx(_))
    }

    fn truth(self) -> Option<bool> {
        match self {
            EvalResult::True | EvalResult::Approx(true) => Some(true),
            EvalResult::False | EvalResult::Approx(false) => Some(false),
            EvalResult::Undefined(_) => None,
        }
    }

    pub fn not(self) -> EvalResult {
        match self {
            EvalResult::True => EvalResult::False,
            EvalResult::False => EvalResult::True,
            EvalResult::Approx(b) => EvalResult::Approx(!b),
            u => u,
        }
    }

    pub fn and(self, other: EvalResult) -> EvalResult {
        use EvalResult::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (Approx(false), _) | (_, Approx(false)) => Approx(false),
            (Undefined(x), Undefined(y)) => Undefined(x.min(y)),
            (Undefined(x), _) | (_, Undefined(x)) => Undefined(x),
            (True, True) => True,
            _ => Approx(true),
        }
    }

    pub fn or(self, other: EvalResult) -> EvalResult {
        self.not().and(other.not()).not()
    }
}

/// Evaluates a typechecked expression.
///
/// # Panics
///
/// If a free variable of `e` is not bound in `a`.
pub fn evaluate(e: &Expr, a: &Assignment, cfg: &EvalConfig) -> EvalResult {
    Evaluator { assignment: a, cfg, scope: Vec::new() }.boolean(e)
}

type Term = Result<Value, UndefReason>;

struct Evaluator<'a> {
    assignment: &'a Assignment,
    cfg: &'a EvalConfig,
    scope: Vec<(&'a str, i64)>,
}

fn both(l: Term, r: Term) -> Result<(Value, Value), UndefReason> {
    match (l, r) {
        (Ok(l), Ok(r)) => Ok((l, r)),
        (Err(x), Err(y)) => Err(x.min(y)),
        (Err(x), _) | (_, Err(x)) => Err(x),
    }
}

fn is_bool_expr(e: &Expr) -> bool {
    match &e.ty {
        Some(t) => *t == Type::Bool,
        None => matches!(
            e.kind,
            ExprKind::Bool(_) | ExprKind::Unary(UnOp::Not, _) | ExprKind::Imp(..) | ExprKind::Quant { .. }
        ) || matches!(e.kind, ExprKind::Binary(op, ..) if !op.is_arithmetic()),
    }
}

impl<'a> Evaluator<'a> {
    fn lookup(&self, name: &str) -> Value {
        if let Some((_, i)) = self.scope.iter().rev().find(|(n, _)| *n == name) {
            return Value::Int(*i);
        }
        match self.assignment.get(name) {
            Some(v) => v.clone(),
            None => panic!("unbound variable `{name}`"),
        }
    }

    fn boolean(&mut self, e: &'a Expr) -> EvalResult {
        match &e.kind {
            ExprKind::Bool(b) => EvalResult::from_bool(*b),
            ExprKind::Var(n) => match self.lookup(n) {
                Value::Bool(b) => EvalResult::from_bool(b),
                other => panic!("`{n}` = {other} used as a boolean"),
            },
            ExprKind::Unary(UnOp::Not, c) => self.boolean(c).not(),
            ExprKind::Binary(BinOp::And, l, r) => {
                let lv = self.boolean(l);
                if lv == EvalResult::False {
                    return lv;
                }
                lv.and(self.boolean(r))
            }
            ExprKind::Binary(BinOp::Or, l, r) => {
                let lv = self.boolean(l);
                if lv == EvalResult::True {
                    return lv;
                }
                lv.or(self.boolean(r))
            }
            ExprKind::Imp(a, c) => {
                let av = self.boolean(a).not();
                if av == EvalResult::True {
                    return av;
                }
                av.or(self.boolean(c))
            }
            ExprKind::Binary(op, l, r) if op.is_equality() && is_bool_expr(l) => {
                let (lv, rv) = (self.boolean(l), self.boolean(r));
                let (lt, rt) = match (lv, rv) {
                    (EvalResult::Undefined(x), EvalResult::Undefined(y)) => return EvalResult::Undefined(x.min(y)),
                    (EvalResult::Undefined(x), _) | (_, EvalResult::Undefined(x)) => return EvalResult::Undefined(x),
                    (l, r) => (l.truth().unwrap(), r.truth().unwrap()),
                };
                let same = (lt == rt) == (*op == BinOp::Eq);
                if lv.is_approx() || rv.is_approx() {
                    EvalResult::Approx(same)
                } else {
                    EvalResult::from_bool(same)
                }
            }
            ExprKind::Binary(op, l, r) => {
                let (lv, rv) = match both(self.term(l), self.term(r)) {
                    Ok(p) => p,
                    Err(why) => return EvalResult::Undefined(why),
                };
                let eps = self.cfg.real_eq_epsilon;
                let result = match op {
                    BinOp::Eq => values_equal(&lv, &rv, eps).unwrap_or(false),
                    BinOp::Neq => !values_equal(&lv, &rv, eps).unwrap_or(false),
                    _ => compare(*op, &lv, &rv),
                };
                EvalResult::from_bool(result)
            }
            ExprKind::Quant { kind, array, binder, body } => {
                let len = match self.term(array) {
                    Err(why) => return EvalResult::Undefined(why),
                    Ok(Value::Array(items)) => items.len(),
                    Ok(Value::Null) => return EvalResult::Undefined(UndefReason::NullDeref),
                    Ok(other) => panic!("quantifier over non-array {other}"),
                };
                let bound = len.min(self.cfg.quant_bound);
                let forall = *kind == QuantKind::Forall;
                let (mut acc, decisive) = if forall {
                    (EvalResult::True, EvalResult::False)
                } else {
                    (EvalResult::False, EvalResult::True)
                };
                for i in 0..bound {
                    self.scope.push((binder.as_str(), i as i64));
                    let b = self.boolean(body);
                    self.scope.pop();
                    acc = if forall { acc.and(b) } else { acc.or(b) };
                    if acc == decisive {
                        return acc;
                    }
                }
                if bound < len {
                    acc = if forall { acc.and(EvalResult::Approx(true)) } else { acc.or(EvalResult::Approx(false)) };
                }
                acc
            }
            _ => panic!("not a boolean expression: {e:?}"),
        }
    }

    fn term(&mut self, e: &'a Expr) -> Term {
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Real(v) => Ok(Value::Real(*v)),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::Var(n) => Ok(self.lookup(n)),
            ExprKind::Unary(UnOp::Neg, c) => match self.term(c)? {
                Value::Int(v) => Ok(Value::Int(v.wrapping_neg())),
                Value::Real(v) => Ok(Value::Real(-v)),
                other => panic!("negating {other}"),
            },
            ExprKind::Binary(op, l, r) if op.is_arithmetic() => {
                let (lv, rv) = both(self.term(l), self.term(r))?;
                arith(*op, &lv, &rv)
            }
            ExprKind::Length(arr) => match self.term(arr)? {
                Value::Array(items) => Ok(Value::Int(items.len() as i64)),
                Value::Null => Err(UndefReason::NullDeref),
                other => panic!("length of {other}"),
            },
            ExprKind::Index(arr, idx) => {
                let (av, iv) = both(self.term(arr), self.term(idx))?;
                let Value::Int(i) = iv else { panic!("index {iv}") };
                match av {
                    Value::Null => Err(UndefReason::NullDeref),
                    Value::Array(mut items) => {
                        if i < 0 || i as usize >= items.len() {
                            Err(UndefReason::IndexOob)
                        } else {
                            Ok(items.swap_remove(i as usize))
                        }
                    }
                    other => panic!("indexing {other}"),
                }
            }
            _ => match self.boolean(e) {
                EvalResult::Undefined(why) => Err(why),
                r => Ok(Value::Bool(r.holds())),
            },
        }
    }
}

fn as_real(v: &Value) -> f64 {
    match v {
        Value::Int(i) => *i as f64,
        Value::Real(r) => *r,
        other => panic!("{other} is not numeric"),
    }
}

fn arith(op: BinOp, l: &Value, r: &Value) -> Term {
    if let (Value::Int(a), Value::Int(b)) = (l, r) {
        let (a, b) = (*a, *b);
        return Ok(Value::Int(match op {
            BinOp::Add => a.wrapping_add(b),
            BinOp::Sub => a.wrapping_sub(b),
            BinOp::Mul => a.wrapping_mul(b),
            BinOp::Div if b == 0 => return Err(UndefReason::DivByZero),
            BinOp::Div => a.wrapping_div(b),
            BinOp::Mod if b == 0 => return Err(UndefReason::DivByZero),
            BinOp::Mod => a.wrapping_rem(b),
            _ => unreachable!(),
        }));
    }
    let (a, b) = (as_real(l), as_real(r));
    Ok(Value::Real(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div | BinOp::Mod if b == 0.0 => return Err(UndefReason::DivByZero),
        BinOp::Div => a / b,
        BinOp::Mod => a % b,
        _ => unreachable!(),
    }))
}

fn compare(op: BinOp, l: &Value, r: &Value) -> bool {
    if let (Value::Int(a), Value::Int(b)) = (l, r) {
        return match op {
            BinOp::Lt => a < b,
            BinOp::Le => a <= b,
            BinOp::Gt => a > b,
            BinOp::Ge => a >= b,
            _ => unreachable!(),
        };
    }
    let (a, b) = (as_real(l), as_real(r));
    match op {
        BinOp::Lt => a < b,
        BinOp::Le => a <= b,
        BinOp::Gt => a > b,
        BinOp::Ge => a >= b,
        _ => unreachable!(),
    }
}

/// Equality with numeric coercion; arrays compare element-wise and `null == null`.
/// `None` when the values have incomparable shapes.
pub fn values_equal(l: &Value, r: &Value, eps: f64) -> Option<bool> {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => Some(a == b),
        (Value::Int(_) | Value::Real(_), Value::Int(_) | Value::Real(_)) => {
            let (a, b) = (as_real(l), as_real(r));
            Some(a == b || (a - b).abs() <= eps)
        }
        (Value::Bool(a), Value::Bool(b)) => Some(a == b),
        (Value::Null, Value::Null) => Some(true),
        (Value::Null, Value::Array(_)) | (Value::Array(_), Value::Null) => Some(false),
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                return Some(false);
            }
            let mut all = true;
            for (x, y) in xs.iter().zip(ys) {
                all &= values_equal(x, y, eps)?;
            }
            Some(all)
        }
        _ => None,
    }
}
