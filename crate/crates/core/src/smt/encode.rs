//! Translation of specification formulas into SMT-LIB v2.
//!
//! Formulas are encoded by polarity: `tf(e, true)` is satisfied exactly by the
//! assignments on which `e` evaluates to true, `tf(e, false)` by those on which it
//! evaluates to false. Undefined sub-terms never satisfy either side, which is how
//! null dereferences, out-of-bounds indexing and division by zero are modelled: every
//! atom carries the guards (non-null, in-bounds, non-zero divisor) of the terms it reads.
//!
//! An `n`-dimensional array variable `a` becomes
//! * `v_a_null : Bool` and `v_a_len : Int` for the array itself,
//! * `v_a_null<k>` and `v_a_len<k>`, arrays indexed by `k` integers, for nested levels,
//! * `v_a_data`, an array indexed by `n` integers holding the scalar elements.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::dsl::{BinOp, Expr, ExprKind, QuantKind, Signature, Type, UnOp};

/// Restricts every integral scalar and element to `int_range` and every array length to
/// `max_len`. Quantifiers are then unrolled, so queries stay quantifier-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Bounds {
    pub int_range: (i64, i64),
    pub max_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeOptions {
    /// Upper bound on every array length when `bounds` is absent.
    pub lmax: u64,
    pub bounds: Option<Bounds>,
    pub real_eq_epsilon: f64,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { lmax: 1_000_000, bounds: None, real_eq_epsilon: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EncodeError {
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// One assertion of a query.
#[derive(Debug, Clone)]
pub enum Goal {
    /// The formula evaluates to true.
    Holds(Expr),
    /// The formula does not evaluate to true (it is false or undefined).
    NotHolds(Expr),
    /// At least one of the formulas evaluates to false.
    AnyFalse(Vec<Expr>),
}

/// A complete script together with the SMT symbols introduced for each variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SmtEncoding {
    pub script: String,
    pub symbols: BTreeMap<String, Vec<String>>,
}

const PRELUDE: &str = "\
(set-logic ALL)
(define-fun jdiv ((a Int) (b Int)) Int (ite (= (>= a 0) (> b 0)) (div (abs a) (abs b)) (- (div (abs a) (abs b)))))
(define-fun jrem ((a Int) (b Int)) Int (- a (* b (jdiv a b))))
(define-fun rtrunc ((x Real)) Int (ite (>= x 0.0) (to_int x) (- (to_int (- x)))))
(define-fun rmod ((a Real) (b Real)) Real (- a (* b (to_real (rtrunc (/ a b))))))
";

pub(crate) fn base_name(var: &str) -> String {
    format!("v_{var}")
}

pub(crate) fn select(array: &str, idx: &[String]) -> String {
    idx.iter().fold(array.to_string(), |acc, i| format!("(select {acc} {i})"))
}

/// A (possibly nested) array value: variable `base` indexed by `idx`.
#[derive(Debug, Clone)]
pub(crate) struct Path {
    pub base: String,
    pub depth: usize,
    pub elem: Type,
    pub idx: Vec<String>,
}

impl Path {
    pub fn root(base: String, ty: &Type) -> Path {
        Path { base, depth: ty.depth(), elem: ty.scalar().clone(), idx: Vec::new() }
    }

    fn level_symbol(&self, what: &str) -> String {
        match self.idx.len() {
            0 => format!("{}_{what}", self.base),
            k => select(&format!("{}_{what}{k}", self.base), &self.idx),
        }
    }

    pub fn null(&self) -> String {
        self.level_symbol("null")
    }

    pub fn len(&self) -> String {
        self.level_symbol("len")
    }

    /// Whether indexing this array yields scalars.
    pub fn holds_scalars(&self) -> bool {
        self.idx.len() + 1 == self.depth
    }

    pub fn child(&self, i: String) -> Path {
        let mut p = self.clone();
        p.idx.push(i);
        p
    }

    pub fn element(&self, i: String) -> String {
        let mut idx = self.idx.clone();
        idx.push(i);
        select(&format!("{}_data", self.base), &idx)
    }
}

#[derive(Debug, Clone)]
enum Term {
    Val(String, Type),
    Arr(Path),
    Null,
}

fn sort(t: &Type) -> &'static str {
    match t {
        t if t.is_integral() => "Int",
        t if t.is_real() => "Real",
        _ => "Bool",
    }
}

fn nested_sort(k: usize, leaf: &str) -> String {
    (0..k).fold(leaf.to_string(), |acc, _| format!("(Array Int {acc})"))
}

fn int_lit(v: i64) -> String {
    if v < 0 {
        format!("(- {})", (v as i128).unsigned_abs())
    } else {
        v.to_string()
    }
}

fn real_lit(v: f64) -> Result<String, EncodeError> {
    if !v.is_finite() {
        return Err(EncodeError::Unsupported(format!("non-finite literal {v}")));
    }
    let mut s = format!("{}", v.abs());
    if !s.contains('.') {
        s.push_str(".0");
    }
    Ok(if v < 0.0 { format!("(- {s})") } else { s })
}

/// Flattens nested applications of `op` produced by this module.
fn junction(op: &str, items: Vec<String>, unit: &str) -> String {
    if items.len() <= 1 {
        return items.into_iter().next().unwrap_or_else(|| unit.into());
    }
    let prefix = format!("({op} ");
    let flat: Vec<String> = items
        .into_iter()
        .map(|s| match s.strip_prefix(&prefix).and_then(|r| r.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => s,
        })
        .collect();
    format!("{prefix}{})", flat.join(" "))
}

pub(crate) fn and(items: Vec<String>) -> String {
    if items.iter().any(|s| s == "false") {
        return "false".into();
    }
    junction("and", items.into_iter().filter(|s| s != "true").collect(), "true")
}

pub(crate) fn or(items: Vec<String>) -> String {
    if items.iter().any(|s| s == "true") {
        return "true".into();
    }
    junction("or", items.into_iter().filter(|s| s != "false").collect(), "false")
}

pub(crate) fn not(s: String) -> String {
    match s.as_str() {
        "true" => "false".into(),
        "false" => "true".into(),
        _ => format!("(not {s})"),
    }
}

fn tuples(k: usize, n: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i.to_string());
                    t
                })
            })
            .collect();
    }
    out
}

fn is_bool(e: &Expr) -> bool {
    match &e.ty {
        Some(t) => *t == Type::Bool,
        None => matches!(
            e.kind,
            ExprKind::Bool(_) | ExprKind::Unary(UnOp::Not, _) | ExprKind::Imp(..) | ExprKind::Quant { .. }
        ) || matches!(e.kind, ExprKind::Binary(op, ..) if !op.is_arithmetic()),
    }
}

type Env = Vec<(String, String)>;
type Enc<T> = Result<T, EncodeError>;

pub(crate) struct Encoder<'a> {
    vars: Vec<(String, Type)>,
    opts: &'a EncodeOptions,
    fresh: usize,
}

impl<'a> Encoder<'a> {
    pub fn new(sig: &Signature, with_retval: bool, opts: &'a EncodeOptions) -> Encoder<'a> {
        Encoder { vars: sig.variables(with_retval), opts, fresh: 0 }
    }

    pub fn variables(&self) -> &[(String, Type)] {
        &self.vars
    }

    fn len_cap(&self) -> u64 {
        match &self.opts.bounds {
            Some(b) => b.max_len as u64,
            None => self.opts.lmax,
        }
    }

    fn int_bounds(&self, t: &Type) -> Option<(i64, i64)> {
        let short = (i16::MIN as i64, i16::MAX as i64);
        match (&self.opts.bounds, t) {
            (Some(b), Type::Short) => Some((b.int_range.0.max(short.0), b.int_range.1.min(short.1))),
            (Some(b), t) if t.is_integral() => Some(b.int_range),
            (None, Type::Short) => Some(short),
            _ => None,
        }
    }

    fn range(term: &str, (lo, hi): (i64, i64)) -> String {
        format!("(and (<= {} {term}) (<= {term} {}))", int_lit(lo), int_lit(hi))
    }

    /// Declarations and background assertions for every variable.
    fn declarations(&self, out: &mut String, symbols: &mut BTreeMap<String, Vec<String>>) {
        let cap = self.len_cap();
        for (name, ty) in &self.vars {
            let base = base_name(name);
            let mut syms = Vec::new();
            if !ty.is_array() {
                writeln!(out, "(declare-const {base} {})", sort(ty)).unwrap();
                if let Some(r) = self.int_bounds(ty) {
                    writeln!(out, "(assert {})", Self::range(&base, r)).unwrap();
                }
                syms.push(base);
                symbols.insert(name.clone(), syms);
                continue;
            }
            let d = ty.depth();
            let elem = ty.scalar();
            writeln!(out, "(declare-const {base}_null Bool)").unwrap();
            writeln!(out, "(declare-const {base}_len Int)").unwrap();
            writeln!(out, "(assert (and (<= 0 {base}_len) (<= {base}_len {cap})))").unwrap();
            syms.push(format!("{base}_null"));
            syms.push(format!("{base}_len"));
            for k in 1..d {
                writeln!(out, "(declare-const {base}_null{k} {})", nested_sort(k, "Bool")).unwrap();
                writeln!(out, "(declare-const {base}_len{k} {})", nested_sort(k, "Int")).unwrap();
                syms.push(format!("{base}_null{k}"));
                syms.push(format!("{base}_len{k}"));
                let len_sym = format!("{base}_len{k}");
                match &self.opts.bounds {
                    Some(b) => {
                        for t in tuples(k, b.max_len) {
                            let l = select(&len_sym, &t);
                            writeln!(out, "(assert (and (<= 0 {l}) (<= {l} {cap})))").unwrap();
                        }
                    }
                    None => {
                        let (binders, idx) = self.binders(k);
                        let l = select(&len_sym, &idx);
                        writeln!(out, "(assert (forall ({binders}) (and (<= 0 {l}) (<= {l} {cap}))))").unwrap();
                    }
                }
            }
            writeln!(out, "(declare-const {base}_data {})", nested_sort(d, sort(elem))).unwrap();
            syms.push(format!("{base}_data"));
            if let Some(r) = self.int_bounds(elem) {
                let data = format!("{base}_data");
                match &self.opts.bounds {
                    Some(b) => {
                        for t in tuples(d, b.max_len) {
                            writeln!(out, "(assert {})", Self::range(&select(&data, &t), r)).unwrap();
                        }
                    }
                    None => {
                        let (binders, idx) = self.binders(d);
                        writeln!(out, "(assert (forall ({binders}) {}))", Self::range(&select(&data, &idx), r)).unwrap();
                    }
                }
            }
            symbols.insert(name.clone(), syms);
        }
    }

    fn binders(&self, k: usize) -> (String, Vec<String>) {
        let idx: Vec<String> = (1..=k).map(|i| format!("ax{i}")).collect();
        let binders = idx.iter().map(|i| format!("({i} Int)")).collect::<Vec<_>>().join(" ");
        (binders, idx)
    }

    /// Script asserting all `goals`, ending in `(check-sat)`.
    pub fn script(&mut self, goals: &[Goal]) -> Enc<SmtEncoding> {
        let mut out = String::from(PRELUDE);
        let mut symbols = BTreeMap::new();
        self.declarations(&mut out, &mut symbols);
        for g in goals {
            let f = match g {
                Goal::Holds(e) => self.tf(e, &Vec::new(), true)?,
                Goal::NotHolds(e) => not(self.tf(e, &Vec::new(), true)?),
                Goal::AnyFalse(es) => {
                    let mut parts = Vec::new();
                    for e in es {
                        parts.push(self.tf(e, &Vec::new(), false)?);
                    }
                    or(parts)
                }
            };
            writeln!(out, "(assert {f})").unwrap();
        }
        out.push_str("(check-sat)\n");
        Ok(SmtEncoding { script: out, symbols })
    }

    fn fresh(&mut self, hint: &str) -> String {
        self.fresh += 1;
        format!("q{}_{hint}", self.fresh)
    }

    /// `body(i)` for every index `i` below `len`.
    fn all_below(&mut self, len: &str, hint: &str, mut body: impl FnMut(&mut Self, String) -> Enc<String>) -> Enc<String> {
        match self.opts.bounds.clone() {
            Some(b) => {
                let mut parts = Vec::new();
                for c in 0..b.max_len {
                    let inner = body(self, c.to_string())?;
                    parts.push(or(vec![format!("(<= {len} {c})"), inner]));
                }
                Ok(and(parts))
            }
            None => {
                let j = self.fresh(hint);
                let inner = body(self, j.clone())?;
                if inner == "true" {
                    return Ok(inner);
                }
                Ok(format!("(forall (({j} Int)) (=> (and (<= 0 {j}) (< {j} {len})) {inner}))"))
            }
        }
    }

    /// `body(i)` for some index `i` below `len`.
    fn any_below(&mut self, len: &str, hint: &str, mut body: impl FnMut(&mut Self, String) -> Enc<String>) -> Enc<String> {
        match self.opts.bounds.clone() {
            Some(b) => {
                let mut parts = Vec::new();
                for c in 0..b.max_len {
                    let inner = body(self, c.to_string())?;
                    parts.push(and(vec![format!("(< {c} {len})"), inner]));
                }
                Ok(or(parts))
            }
            None => {
                let j = self.fresh(hint);
                let inner = body(self, j.clone())?;
                if inner == "false" {
                    return Ok(inner);
                }
                Ok(format!("(exists (({j} Int)) (and (<= 0 {j}) (< {j} {len}) {inner}))"))
            }
        }
    }

    /// Satisfied exactly where `e` evaluates to `pos`.
    pub fn tf(&mut self, e: &Expr, env: &Env, pos: bool) -> Enc<String> {
        match &e.kind {
            ExprKind::Bool(b) => Ok((*b == pos).to_string()),
            ExprKind::Unary(UnOp::Not, x) => self.tf(x, env, !pos),
            ExprKind::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
                let (a, b) = (self.tf(l, env, pos)?, self.tf(r, env, pos)?);
                if (*op == BinOp::And) == pos {
                    Ok(and(vec![a, b]))
                } else {
                    Ok(or(vec![a, b]))
                }
            }
            ExprKind::Imp(a, c) => {
                let (a, c) = (self.tf(a, env, !pos)?, self.tf(c, env, pos)?);
                Ok(if pos { or(vec![a, c]) } else { and(vec![a, c]) })
            }
            ExprKind::Quant { kind, array, binder, body } => {
                let mut guards = Vec::new();
                let path = match self.term(array, env, &mut guards)? {
                    Term::Arr(p) => p,
                    Term::Null => return Ok("false".into()),
                    Term::Val(..) => return Err(EncodeError::Unsupported("quantifier over a scalar".into())),
                };
                guards.push(not(path.null()));
                let len = path.len();
                let universal = (*kind == QuantKind::Forall) == pos;
                let f = |enc: &mut Self, i: String| {
                    let mut inner = env.clone();
                    inner.push((binder.clone(), i));
                    enc.tf(body, &inner, pos)
                };
                let q = if universal { self.all_below(&len, binder, f)? } else { self.any_below(&len, binder, f)? };
                guards.push(q);
                Ok(and(guards))
            }
            ExprKind::Binary(op, l, r) if op.is_equality() && is_bool(l) => {
                let (tl, fl) = (self.tf(l, env, true)?, self.tf(l, env, false)?);
                let (tr, fr) = (self.tf(r, env, true)?, self.tf(r, env, false)?);
                let same = or(vec![and(vec![tl.clone(), tr.clone()]), and(vec![fl.clone(), fr.clone()])]);
                let differ = or(vec![and(vec![tl, fr]), and(vec![fl, tr])]);
                Ok(if (*op == BinOp::Eq) == pos { same } else { differ })
            }
            ExprKind::Binary(op, l, r) if op.is_comparison() || op.is_equality() => {
                let mut guards = Vec::new();
                let lt = self.term(l, env, &mut guards)?;
                let rt = self.term(r, env, &mut guards)?;
                let raw = self.atom(*op, lt, rt)?;
                guards.push(if pos { raw } else { not(raw) });
                Ok(and(guards))
            }
            ExprKind::Var(_) | ExprKind::Index(..) => {
                let mut guards = Vec::new();
                match self.term(e, env, &mut guards)? {
                    Term::Val(s, Type::Bool) => {
                        guards.push(if pos { s } else { not(s) });
                        Ok(and(guards))
                    }
                    _ => Err(EncodeError::Unsupported(format!("non-boolean formula {e:?}"))),
                }
            }
            _ => Err(EncodeError::Unsupported(format!("non-boolean formula {e:?}"))),
        }
    }

    fn atom(&mut self, op: BinOp, l: Term, r: Term) -> Enc<String> {
        match (l, r) {
            (Term::Val(a, at), Term::Val(b, bt)) => {
                let real = at.is_real() || bt.is_real();
                let (a, b) = if real { (to_real(a, &at), to_real(b, &bt)) } else { (a, b) };
                Ok(match op {
                    BinOp::Eq | BinOp::Neq => {
                        let eq = if real && self.opts.real_eq_epsilon > 0.0 {
                            let eps = real_lit(self.opts.real_eq_epsilon)?;
                            format!("(and (<= (- {a} {b}) {eps}) (<= (- {b} {a}) {eps}))")
                        } else {
                            format!("(= {a} {b})")
                        };
                        if op == BinOp::Eq { eq } else { not(eq) }
                    }
                    BinOp::Lt => format!("(< {a} {b})"),
                    BinOp::Le => format!("(<= {a} {b})"),
                    BinOp::Gt => format!("(> {a} {b})"),
                    BinOp::Ge => format!("(>= {a} {b})"),
                    other => return Err(EncodeError::Unsupported(format!("atom operator {other:?}"))),
                })
            }
            (l, r) if op.is_equality() => {
                let eq = self.array_eq(&l, &r)?;
                Ok(if op == BinOp::Eq { eq } else { not(eq) })
            }
            _ => Err(EncodeError::Unsupported(format!("comparison {op:?} on arrays"))),
        }
    }

    fn array_eq(&mut self, l: &Term, r: &Term) -> Enc<String> {
        match (l, r) {
            (Term::Null, Term::Null) => Ok("true".into()),
            (Term::Null, Term::Arr(p)) | (Term::Arr(p), Term::Null) => Ok(p.null()),
            (Term::Arr(p), Term::Arr(q)) => {
                let (np, nq) = (p.null(), q.null());
                let (lp, lq) = (p.len(), q.len());
                let elems = self.all_below(&lp, "eq", |enc, j| {
                    if p.holds_scalars() {
                        let a = Term::Val(p.element(j.clone()), p.elem.clone());
                        let b = Term::Val(q.element(j), q.elem.clone());
                        enc.atom(BinOp::Eq, a, b)
                    } else {
                        enc.array_eq(&Term::Arr(p.child(j.clone())), &Term::Arr(q.child(j)))
                    }
                })?;
                Ok(or(vec![
                    and(vec![np.clone(), nq.clone()]),
                    and(vec![not(np), not(nq), format!("(= {lp} {lq})"), elems]),
                ]))
            }
            _ => Err(EncodeError::Unsupported("array compared with a scalar".into())),
        }
    }

    fn term(&mut self, e: &Expr, env: &Env, guards: &mut Vec<String>) -> Enc<Term> {
        let ty = e.ty.clone();
        match &e.kind {
            ExprKind::Int(v) => Ok(Term::Val(int_lit(*v), ty.unwrap_or(Type::Long))),
            ExprKind::Real(v) => Ok(Term::Val(real_lit(*v)?, ty.unwrap_or(Type::Double))),
            ExprKind::Bool(b) => Ok(Term::Val(b.to_string(), Type::Bool)),
            ExprKind::Null => Ok(Term::Null),
            ExprKind::Var(n) => {
                if let Some((_, s)) = env.iter().rev().find(|(b, _)| b == n) {
                    return Ok(Term::Val(s.clone(), Type::Int));
                }
                let (_, vty) = self
                    .vars
                    .iter()
                    .find(|(v, _)| v == n)
                    .ok_or_else(|| EncodeError::UnknownVariable(n.clone()))?;
                if vty.is_array() {
                    Ok(Term::Arr(Path::root(base_name(n), vty)))
                } else {
                    Ok(Term::Val(base_name(n), vty.clone()))
                }
            }
            ExprKind::Unary(UnOp::Neg, c) => match self.term(c, env, guards)? {
                Term::Val(s, t) => Ok(Term::Val(format!("(- {s})"), t)),
                _ => Err(EncodeError::Unsupported("negated array".into())),
            },
            ExprKind::Binary(op, l, r) if op.is_arithmetic() => {
                let (Term::Val(a, at), Term::Val(b, bt)) = (self.term(l, env, guards)?, self.term(r, env, guards)?) else {
                    return Err(EncodeError::Unsupported("arithmetic on arrays".into()));
                };
                let real = at.is_real() || bt.is_real();
                let rty = ty.unwrap_or(if real { Type::Double } else { Type::Long });
                if real {
                    let (a, b) = (to_real(a, &at), to_real(b, &bt));
                    let s = match op {
                        BinOp::Add => format!("(+ {a} {b})"),
                        BinOp::Sub => format!("(- {a} {b})"),
                        BinOp::Mul => format!("(* {a} {b})"),
                        BinOp::Div | BinOp::Mod => {
                            guards.push(format!("(not (= {b} 0.0))"));
                            if *op == BinOp::Div { format!("(/ {a} {b})") } else { format!("(rmod {a} {b})") }
                        }
                        _ => unreachable!(),
                    };
                    Ok(Term::Val(s, rty))
                } else {
                    let s = match op {
                        BinOp::Add => format!("(+ {a} {b})"),
                        BinOp::Sub => format!("(- {a} {b})"),
                        BinOp::Mul => format!("(* {a} {b})"),
                        BinOp::Div | BinOp::Mod => {
                            guards.push(format!("(not (= {b} 0))"));
                            if *op == BinOp::Div { format!("(jdiv {a} {b})") } else { format!("(jrem {a} {b})") }
                        }
                        _ => unreachable!(),
                    };
                    Ok(Term::Val(s, rty))
                }
            }
            ExprKind::Length(a) => match self.term(a, env, guards)? {
                Term::Arr(p) => {
                    guards.push(not(p.null()));
                    Ok(Term::Val(p.len(), Type::Int))
                }
                Term::Null => {
                    guards.push("false".into());
                    Ok(Term::Val("0".into(), Type::Int))
                }
                Term::Val(..) => Err(EncodeError::Unsupported("length of a scalar".into())),
            },
            ExprKind::Index(a, i) => {
                let arr = self.term(a, env, guards)?;
                let Term::Val(i, _) = self.term(i, env, guards)? else {
                    return Err(EncodeError::Unsupported("array used as an index".into()));
                };
                match arr {
                    Term::Arr(p) => {
                        guards.push(not(p.null()));
                        guards.push(format!("(<= 0 {i})"));
                        guards.push(format!("(< {i} {})", p.len()));
                        if p.holds_scalars() {
                            Ok(Term::Val(p.element(i), p.elem.clone()))
                        } else {
                            Ok(Term::Arr(p.child(i)))
                        }
                    }
                    Term::Null => {
                        guards.push("false".into());
                        Ok(Term::Null)
                    }
                    Term::Val(..) => Err(EncodeError::Unsupported("indexing a scalar".into())),
                }
            }
            _ => Err(EncodeError::Unsupported(format!("boolean formula in term position {e:?}"))),
        }
    }
}

fn to_real(s: String, t: &Type) -> String {
    if t.is_integral() {
        format!("(to_real {s})")
    } else {
        s
    }
}

/// Script asserting that `e` holds, with the declarations for `sig`.
pub fn encode(e: &Expr, sig: &Signature, need_retval: bool, opts: &EncodeOptions) -> Result<SmtEncoding, EncodeError> {
    Encoder::new(sig, need_retval, opts).script(&[Goal::Holds(e.clone())])
}
