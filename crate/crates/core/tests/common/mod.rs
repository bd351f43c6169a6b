//! Test-side ground truth: a small formula language of its own, an independent
//! three-valued reference evaluator, an exhaustive enumerator over a tiny domain and a
//! seeded corpus generator.
//!
//! Domain: ints in [-2, 2], int arrays of length at most 3 with elements in [-2, 2] or
//! null, bools. Formulas are rendered to DSL text so the crate sees them only through
//! its parser.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use prepost::dsl::{BinOp, Expr, ExprKind, QuantKind, UnOp};
use prepost::eval::{Assignment, SplitMix64, Value};
use prepost::problem::Quadrant;

pub const LO: i64 = -2;
pub const HI: i64 = 2;
pub const MAX_LEN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OTy {
    Int,
    Bool,
    IntArr,
}

impl OTy {
    fn dsl(self) -> &'static str {
        match self {
            OTy::Int => "int",
            OTy::Bool => "bool",
            OTy::IntArr => "int[]",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OVal {
    Int(i64),
    Bool(bool),
    Arr(Option<Vec<i64>>),
}

pub type Env = BTreeMap<String, OVal>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arith {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Cmp {
    const ALL: [Cmp; 6] = [Cmp::Lt, Cmp::Le, Cmp::Gt, Cmp::Ge, Cmp::Eq, Cmp::Ne];

    fn sym(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
            Cmp::Eq => "==",
            Cmp::Ne => "!=",
        }
    }

    fn holds(self, l: i64, r: i64) -> bool {
        match self {
            Cmp::Lt => l < r,
            Cmp::Le => l <= r,
            Cmp::Gt => l > r,
            Cmp::Ge => l >= r,
            Cmp::Eq => l == r,
            Cmp::Ne => l != r,
        }
    }

    fn swapped(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Gt,
            Cmp::Le => Cmp::Ge,
            Cmp::Gt => Cmp::Lt,
            Cmp::Ge => Cmp::Le,
            c => c,
        }
    }

    fn negated(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Ge,
            Cmp::Le => Cmp::Gt,
            Cmp::Gt => Cmp::Le,
            Cmp::Ge => Cmp::Lt,
            Cmp::Eq => Cmp::Ne,
            Cmp::Ne => Cmp::Eq,
        }
    }
}

/// Integer term.
#[derive(Debug, Clone, PartialEq)]
pub enum T {
    Lit(i64),
    Var(String),
    Len(String),
    Idx(String, Box<T>),
    Neg(Box<T>),
    Bin(Arith, Box<T>, Box<T>),
}

/// Formula.
#[derive(Debug, Clone, PartialEq)]
pub enum F {
    Const(bool),
    BVar(String),
    Cmp(Cmp, T, T),
    /// `a == null` when the flag is true, `a != null` otherwise.
    Null(String, bool),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Imp(Box<F>, Box<F>),
    Quant { forall: bool, array: String, binder: String, body: Box<F> },
}

pub fn not(f: F) -> F {
    F::Not(Box::new(f))
}

pub fn and(a: F, b: F) -> F {
    F::And(Box::new(a), Box::new(b))
}

pub fn or(a: F, b: F) -> F {
    F::Or(Box::new(a), Box::new(b))
}

// ---------------------------------------------------------------------------------------
// Rendering

pub fn render_t(t: &T) -> String {
    match t {
        T::Lit(v) if *v < 0 => format!("(-{})", -v),
        T::Lit(v) => v.to_string(),
        T::Var(n) => n.clone(),
        T::Len(a) => format!("{a}.length"),
        T::Idx(a, i) => format!("{a}[{}]", render_t(i)),
        T::Neg(x) => format!("(-{})", render_t(x)),
        T::Bin(op, l, r) => {
            let s = match op {
                Arith::Add => "+",
                Arith::Sub => "-",
                Arith::Mul => "*",
                Arith::Div => "/",
                Arith::Mod => "%",
            };
            format!("({} {s} {})", render_t(l), render_t(r))
        }
    }
}

pub fn render(f: &F) -> String {
    match f {
        F::Const(b) => b.to_string(),
        F::BVar(n) => n.clone(),
        F::Cmp(c, l, r) => format!("({} {} {})", render_t(l), c.sym(), render_t(r)),
        F::Null(a, true) => format!("({a} == null)"),
        F::Null(a, false) => format!("({a} != null)"),
        F::Not(x) => format!("!{}", render(x)),
        F::And(a, b) => format!("({} && {})", render(a), render(b)),
        F::Or(a, b) => format!("({} || {})", render(a), render(b)),
        F::Imp(a, b) => format!("imp({}, {})", render(a), render(b)),
        F::Quant { forall, array, binder, body } => {
            format!("{}({array}, {binder} -> {})", if *forall { "forall" } else { "exists" }, render(body))
        }
    }
}

// ---------------------------------------------------------------------------------------
// Reference evaluator. `None` is "undefined" (null dereference, bad index, division by
// zero); connectives follow Kleene's strong three-valued logic.

fn lookup<'a>(env: &'a Env, scope: &[(String, i64)], name: &str) -> Result<&'a OVal, i64> {
    match scope.iter().rev().find(|(n, _)| n == name) {
        Some((_, v)) => Err(*v),
        None => Ok(env.get(name).unwrap_or_else(|| panic!("unbound `{name}`"))),
    }
}

fn array<'a>(env: &'a Env, name: &str) -> &'a Option<Vec<i64>> {
    match env.get(name) {
        Some(OVal::Arr(a)) => a,
        other => panic!("`{name}` is not an array: {other:?}"),
    }
}

pub fn eval_t(t: &T, env: &Env, scope: &mut Vec<(String, i64)>) -> Option<i64> {
    match t {
        T::Lit(v) => Some(*v),
        T::Var(n) => match lookup(env, scope, n) {
            Err(bound) => Some(bound),
            Ok(OVal::Int(v)) => Some(*v),
            Ok(other) => panic!("`{n}` is not an int: {other:?}"),
        },
        T::Len(a) => array(env, a).as_ref().map(|xs| xs.len() as i64),
        T::Idx(a, i) => {
            let xs = array(env, a).as_ref()?;
            let i = eval_t(i, env, scope)?;
            usize::try_from(i).ok().and_then(|i| xs.get(i).copied())
        }
        T::Neg(x) => eval_t(x, env, scope).map(i64::wrapping_neg),
        T::Bin(op, l, r) => {
            let (l, r) = (eval_t(l, env, scope)?, eval_t(r, env, scope)?);
            match op {
                Arith::Add => Some(l.wrapping_add(r)),
                Arith::Sub => Some(l.wrapping_sub(r)),
                Arith::Mul => Some(l.wrapping_mul(r)),
                Arith::Div => (r != 0).then(|| l.wrapping_div(r)),
                Arith::Mod => (r != 0).then(|| l.wrapping_rem(r)),
            }
        }
    }
}

fn kleene_and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn kleene_or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

pub fn eval_in(f: &F, env: &Env, scope: &mut Vec<(String, i64)>) -> Option<bool> {
    match f {
        F::Const(b) => Some(*b),
        F::BVar(n) => match env.get(n) {
            Some(OVal::Bool(b)) => Some(*b),
            other => panic!("`{n}` is not a bool: {other:?}"),
        },
        F::Cmp(c, l, r) => {
            let (l, r) = (eval_t(l, env, scope), eval_t(r, env, scope));
            Some(c.holds(l?, r?))
        }
        F::Null(a, is_null) => Some(array(env, a).is_none() == *is_null),
        F::Not(x) => eval_in(x, env, scope).map(|b| !b),
        F::And(a, b) => kleene_and(eval_in(a, env, scope), eval_in(b, env, scope)),
        F::Or(a, b) => kleene_or(eval_in(a, env, scope), eval_in(b, env, scope)),
        F::Imp(a, b) => kleene_or(eval_in(a, env, scope).map(|b| !b), eval_in(b, env, scope)),
        F::Quant { forall, array: a, binder, body } => {
            let len = array(env, a).as_ref()?.len();
            let mut acc = Some(*forall);
            for i in 0..len {
                scope.push((binder.clone(), i as i64));
                let v = eval_in(body, env, scope);
                scope.pop();
                acc = if *forall { kleene_and(acc, v) } else { kleene_or(acc, v) };
            }
            acc
        }
    }
}

pub fn eval(f: &F, env: &Env) -> Option<bool> {
    eval_in(f, env, &mut Vec::new())
}

// ---------------------------------------------------------------------------------------
// Domain enumeration

pub fn all_arrays() -> Vec<Option<Vec<i64>>> {
    let mut out = vec![None, Some(Vec::new())];
    let mut layer = vec![Vec::new()];
    for _ in 0..MAX_LEN {
        layer = layer
            .iter()
            .flat_map(|xs: &Vec<i64>| {
                (LO..=HI).map(move |v| {
                    let mut ys = xs.clone();
                    ys.push(v);
                    ys
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(Some));
    }
    out
}

fn values(ty: OTy) -> Vec<OVal> {
    match ty {
        OTy::Int => (LO..=HI).map(OVal::Int).collect(),
        OTy::Bool => vec![OVal::Bool(false), OVal::Bool(true)],
        OTy::IntArr => all_arrays().into_iter().map(OVal::Arr).collect(),
    }
}

/// Every assignment of `vars` over the domain.
pub fn enumerate(vars: &[(String, OTy)]) -> Vec<Env> {
    let mut envs = vec![Env::new()];
    for (name, ty) in vars {
        let vals = values(*ty);
        envs = envs
            .iter()
            .flat_map(|e| {
                vals.iter().map(move |v| {
                    let mut e = e.clone();
                    e.insert(name.clone(), v.clone());
                    e
                })
            })
            .collect();
    }
    envs
}

pub fn to_assignment(env: &Env) -> Assignment {
    let mut a = Assignment::new();
    for (k, v) in env {
        let v = match v {
            OVal::Int(i) => Value::Int(*i),
            OVal::Bool(b) => Value::Bool(*b),
            OVal::Arr(None) => Value::Null,
            OVal::Arr(Some(xs)) => Value::Array(xs.iter().map(|x| Value::Int(*x)).collect()),
        };
        a.insert(k.clone(), v);
    }
    a
}

/// Reads an assignment produced by the crate back into the oracle's value space. Values
/// outside the domain are kept as they are.
pub fn from_assignment(a: &Assignment) -> Env {
    a.0.iter()
        .map(|(k, v)| {
            let v = match v {
                Value::Int(i) => OVal::Int(*i),
                Value::Bool(b) => OVal::Bool(*b),
                Value::Null => OVal::Arr(None),
                Value::Array(xs) => OVal::Arr(Some(
                    xs.iter()
                        .map(|x| match x {
                            Value::Int(i) => *i,
                            other => panic!("unexpected element {other:?}"),
                        })
                        .collect(),
                )),
                Value::Real(r) => panic!("unexpected real {r}"),
            };
            (k.clone(), v)
        })
        .collect()
}

// ---------------------------------------------------------------------------------------
// Quadrants

/// Quadrant of one assignment: undefined counts as false for each side, and assignments
/// on which both sides are undefined belong to no quadrant.
pub fn quadrant_of(m: Option<bool>, s: Option<bool>) -> Option<Quadrant> {
    if m.is_none() && s.is_none() {
        return None;
    }
    Some(Quadrant::of(m == Some(true), s == Some(true)))
}

#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub domain: usize,
    pub counts: BTreeMap<Quadrant, usize>,
}

impl OracleReport {
    pub fn count(&self, q: Quadrant) -> usize {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    pub fn equivalent(&self) -> bool {
        self.count(Quadrant::MnS) == 0 && self.count(Quadrant::NMS) == 0
    }

    /// Share of the domain on which the two formulas disagree.
    pub fn differing_fraction(&self) -> f64 {
        (self.count(Quadrant::MnS) + self.count(Quadrant::NMS)) as f64 / self.domain as f64
    }
}

pub fn oracle(m: &F, s: &F, vars: &[(String, OTy)]) -> OracleReport {
    oracle_assuming(m, s, None, vars)
}

/// Like [`oracle`], restricted to assignments on which `assume` is true.
pub fn oracle_assuming(m: &F, s: &F, assume: Option<&F>, vars: &[(String, OTy)]) -> OracleReport {
    let envs: Vec<Env> = enumerate(vars).into_iter().filter(|e| assume.is_none_or(|a| eval(a, e) == Some(true))).collect();
    let mut r = OracleReport { domain: envs.len(), counts: BTreeMap::new() };
    for env in &envs {
        if let Some(q) = quadrant_of(eval(m, env), eval(s, env)) {
            *r.counts.entry(q).or_default() += 1;
        }
    }
    r
}

// ---------------------------------------------------------------------------------------
// Reading crate ASTs into the oracle language

pub fn t_from_expr(e: &Expr) -> T {
    match &e.kind {
        ExprKind::Int(v) => T::Lit(*v),
        ExprKind::Var(n) => T::Var(n.clone()),
        ExprKind::Length(a) => match &a.kind {
            ExprKind::Var(n) => T::Len(n.clone()),
            other => panic!("length of {other:?}"),
        },
        ExprKind::Index(a, i) => match &a.kind {
            ExprKind::Var(n) => T::Idx(n.clone(), Box::new(t_from_expr(i))),
            other => panic!("index into {other:?}"),
        },
        ExprKind::Unary(UnOp::Neg, x) => T::Neg(Box::new(t_from_expr(x))),
        ExprKind::Binary(op, l, r) => {
            let op = match op {
                BinOp::Add => Arith::Add,
                BinOp::Sub => Arith::Sub,
                BinOp::Mul => Arith::Mul,
                BinOp::Div => Arith::Div,
                BinOp::Mod => Arith::Mod,
                other => panic!("{other:?} in a term"),
            };
            T::Bin(op, Box::new(t_from_expr(l)), Box::new(t_from_expr(r)))
        }
        other => panic!("unsupported term {other:?}"),
    }
}

pub fn from_expr(e: &Expr) -> F {
    match &e.kind {
        ExprKind::Bool(b) => F::Const(*b),
        ExprKind::Var(n) => F::BVar(n.clone()),
        ExprKind::Unary(UnOp::Not, x) => not(from_expr(x)),
        ExprKind::Imp(a, b) => F::Imp(Box::new(from_expr(a)), Box::new(from_expr(b))),
        ExprKind::Quant { kind, array, binder, body } => match &array.kind {
            ExprKind::Var(a) => F::Quant {
                forall: *kind == QuantKind::Forall,
                array: a.clone(),
                binder: binder.clone(),
                body: Box::new(from_expr(body)),
            },
            other => panic!("quantifier over {other:?}"),
        },
        ExprKind::Binary(BinOp::And, a, b) => and(from_expr(a), from_expr(b)),
        ExprKind::Binary(BinOp::Or, a, b) => or(from_expr(a), from_expr(b)),
        ExprKind::Binary(op @ (BinOp::Eq | BinOp::Neq), l, r)
            if matches!(l.kind, ExprKind::Null) || matches!(r.kind, ExprKind::Null) =>
        {
            let arr = if matches!(l.kind, ExprKind::Null) { r } else { l };
            match &arr.kind {
                ExprKind::Var(a) => F::Null(a.clone(), *op == BinOp::Eq),
                ExprKind::Null => F::Const(*op == BinOp::Eq),
                other => panic!("null comparison with {other:?}"),
            }
        }
        ExprKind::Binary(op, l, r) => {
            let c = match op {
                BinOp::Lt => Cmp::Lt,
                BinOp::Le => Cmp::Le,
                BinOp::Gt => Cmp::Gt,
                BinOp::Ge => Cmp::Ge,
                BinOp::Eq => Cmp::Eq,
                BinOp::Neq => Cmp::Ne,
                other => panic!("{other:?} as a formula"),
            };
            F::Cmp(c, t_from_expr(l), t_from_expr(r))
        }
        other => panic!("unsupported formula {other:?}"),
    }
}

// ---------------------------------------------------------------------------------------
// Generation

pub struct Sig {
    pub vars: Vec<(String, OTy)>,
}

impl Sig {
    pub fn header(&self) -> String {
        let params: Vec<String> = self.vars.iter().map(|(n, t)| format!("{n}: {}", t.dsl())).collect();
        format!("method f({}) -> int;", params.join(", "))
    }

    fn of(&self, ty: OTy) -> Vec<String> {
        self.vars.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect()
    }
}

pub fn corpus_signatures() -> Vec<Sig> {
    let v = |n: &str, t| (n.to_string(), t);
    vec![
        Sig { vars: vec![v("x", OTy::Int), v("y", OTy::Int)] },
        Sig { vars: vec![v("x", OTy::Int), v("a", OTy::IntArr)] },
        Sig { vars: vec![v("a", OTy::IntArr), v("p", OTy::Bool)] },
        Sig { vars: vec![v("x", OTy::Int), v("p", OTy::Bool)] },
    ]
}

pub struct Gen<'s> {
    pub rng: SplitMix64,
    sig: &'s Sig,
    binders: Vec<String>,
}

impl<'s> Gen<'s> {
    pub fn new(sig: &'s Sig, seed: u64) -> Gen<'s> {
        Gen { rng: SplitMix64::new(seed), sig, binders: Vec::new() }
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs[self.rng.below(xs.len() as u64) as usize].clone()
    }

    fn lit(&mut self) -> T {
        T::Lit(self.rng.int_in(LO, HI))
    }

    pub fn term(&mut self, depth: u32) -> T {
        let ints = self.sig.of(OTy::Int);
        let arrays = self.sig.of(OTy::IntArr);
        let mut choices = vec![0, 0];
        if !ints.is_empty() {
            choices.extend([1, 1, 1]);
        }
        if !self.binders.is_empty() {
            choices.extend([2, 2]);
        }
        if !arrays.is_empty() {
            choices.extend([3, 4, 4]);
        }
        if depth > 0 {
            choices.extend([5, 5, 6]);
        }
        match self.pick(&choices) {
            0 => self.lit(),
            1 => T::Var(self.pick(&ints)),
            2 => T::Var(self.pick(&self.binders.clone())),
            3 => T::Len(self.pick(&arrays)),
            4 => {
                let idx = if self.binders.is_empty() || self.rng.chance(0.3) {
                    T::Lit(self.rng.int_in(0, MAX_LEN as i64))
                } else {
                    T::Var(self.pick(&self.binders.clone()))
                };
                T::Idx(self.pick(&arrays), Box::new(idx))
            }
            5 => {
                let op = self.pick(&[Arith::Add, Arith::Sub, Arith::Mul, Arith::Add, Arith::Div, Arith::Mod]);
                let l = self.term(depth - 1);
                let r = if matches!(op, Arith::Div | Arith::Mod | Arith::Mul) { self.lit() } else { self.term(depth - 1) };
                T::Bin(op, Box::new(l), Box::new(r))
            }
            _ => T::Neg(Box::new(self.term(depth - 1))),
        }
    }

    pub fn atom(&mut self, depth: u32) -> F {
        let bools = self.sig.of(OTy::Bool);
        let arrays = self.sig.of(OTy::IntArr);
        let mut choices = vec![0, 0, 0, 0, 0];
        if !bools.is_empty() {
            choices.extend([1, 1]);
        }
        if !arrays.is_empty() && self.binders.is_empty() {
            choices.extend([2, 2]);
            if depth > 0 {
                choices.extend([3, 3]);
            }
        }
        if self.rng.chance(0.03) {
            return F::Const(self.rng.coin());
        }
        match self.pick(&choices) {
            0 => {
                let c = self.pick(&Cmp::ALL);
                F::Cmp(c, self.term(1), self.term(1))
            }
            1 => F::BVar(self.pick(&bools)),
            2 => F::Null(self.pick(&arrays), self.rng.chance(0.3)),
            _ => {
                let array = self.pick(&arrays);
                let binder = format!("i{}", self.binders.len());
                self.binders.push(binder.clone());
                let body = self.formula(depth - 1);
                self.binders.pop();
                F::Quant { forall: self.rng.coin(), array, binder, body: Box::new(body) }
            }
        }
    }

    /// A formula with at most `depth` nested connectives.
    pub fn formula(&mut self, depth: u32) -> F {
        if depth == 0 || self.rng.chance(0.3) {
            return self.atom(depth);
        }
        let d = depth - 1;
        match self.rng.below(7) {
            0 => not(self.formula(d)),
            1 | 2 => and(self.formula(d), self.formula(d)),
            3 | 4 => or(self.formula(d), self.formula(d)),
            5 => F::Imp(Box::new(self.formula(d)), Box::new(self.formula(d))),
            _ => self.atom(depth),
        }
    }

    /// A semantically equivalent rewrite (three-valued equivalence is preserved by every
    /// rule).
    pub fn rewrite(&mut self, f: &F) -> F {
        let roll = self.rng.below(4);
        match f {
            F::Imp(a, b) if roll == 0 => or(not(self.rewrite(a)), self.rewrite(b)),
            F::Imp(a, b) => F::Imp(Box::new(self.rewrite(a)), Box::new(self.rewrite(b))),
            F::And(a, b) if roll == 0 => not(or(not(self.rewrite(a)), not(self.rewrite(b)))),
            F::And(a, b) if roll == 1 => and(self.rewrite(b), self.rewrite(a)),
            F::And(a, b) => and(self.rewrite(a), self.rewrite(b)),
            F::Or(a, b) if roll == 0 => not(and(not(self.rewrite(a)), not(self.rewrite(b)))),
            F::Or(a, b) if roll == 1 => or(self.rewrite(b), self.rewrite(a)),
            F::Or(a, b) => or(self.rewrite(a), self.rewrite(b)),
            F::Not(x) => match (&**x, roll) {
                (F::Not(y), 0) => self.rewrite(y),
                (F::Cmp(c, l, r), 1) => F::Cmp(c.negated(), l.clone(), r.clone()),
                _ => not(self.rewrite(x)),
            },
            F::Cmp(c, l, r) => match roll {
                0 => F::Cmp(c.swapped(), r.clone(), l.clone()),
                1 => not(F::Cmp(c.negated(), l.clone(), r.clone())),
                _ => f.clone(),
            },
            F::Quant { forall, array, binder, body } if roll == 0 => not(F::Quant {
                forall: !forall,
                array: array.clone(),
                binder: binder.clone(),
                body: Box::new(not(self.rewrite(body))),
            }),
            F::Quant { forall, array, binder, body } => F::Quant {
                forall: *forall,
                array: array.clone(),
                binder: binder.clone(),
                body: Box::new(self.rewrite(body)),
            },
            F::BVar(_) | F::Null(..) | F::Const(_) if roll == 0 => not(not(f.clone())),
            _ => f.clone(),
        }
    }

    /// A small random change, usually (not always) altering the meaning.
    pub fn mutate(&mut self, f: &F) -> F {
        let here = self.rng.chance(0.35);
        match f {
            F::Cmp(c, l, r) if here => match self.rng.below(3) {
                0 => F::Cmp(self.pick(&Cmp::ALL), l.clone(), r.clone()),
                1 => F::Cmp(*c, l.clone(), T::Bin(Arith::Add, Box::new(r.clone()), Box::new(T::Lit(1)))),
                _ => F::Cmp(c.negated(), l.clone(), r.clone()),
            },
            F::And(a, b) if here => or((**a).clone(), (**b).clone()),
            F::Or(a, b) if here => and((**a).clone(), (**b).clone()),
            F::Not(x) if here => (**x).clone(),
            F::Quant { forall, array, binder, body } if here => F::Quant {
                forall: !forall,
                array: array.clone(),
                binder: binder.clone(),
                body: body.clone(),
            },
            F::And(a, b) => if self.rng.coin() { and(self.mutate(a), (**b).clone()) } else { and((**a).clone(), self.mutate(b)) },
            F::Or(a, b) => if self.rng.coin() { or(self.mutate(a), (**b).clone()) } else { or((**a).clone(), self.mutate(b)) },
            F::Imp(a, b) => F::Imp(Box::new(self.mutate(a)), b.clone()),
            F::Not(x) => not(self.mutate(x)),
            F::Quant { forall, array, binder, body } => F::Quant {
                forall: *forall,
                array: array.clone(),
                binder: binder.clone(),
                body: Box::new(self.mutate(body)),
            },
            _ if here || self.rng.coin() => self.atom(0),
            _ => not(f.clone()),
        }
    }
}

/// One corpus entry: model and student clause lists over a signature.
pub struct Pair {
    pub sig_index: usize,
    pub model: Vec<F>,
    pub student: Vec<F>,
}

impl Pair {
    pub fn model_text(&self, sigs: &[Sig]) -> String {
        spec_text(&sigs[self.sig_index], &self.model)
    }

    pub fn student_text(&self, sigs: &[Sig]) -> String {
        spec_text(&sigs[self.sig_index], &self.student)
    }

    pub fn model_f(&self) -> F {
        conj(&self.model)
    }

    pub fn student_f(&self) -> F {
        conj(&self.student)
    }
}

pub fn conj(fs: &[F]) -> F {
    fs.iter().cloned().reduce(and).unwrap_or(F::Const(true))
}

pub fn spec_text(sig: &Sig, pres: &[F]) -> String {
    let mut s = sig.header();
    for f in pres {
        s.push_str(&format!("\npre({});", render(f)));
    }
    s
}

/// Seeded corpus of `n` pairs: a third rewritten (equivalent) pairs, a third mutated
/// pairs and a third independent pairs; some share a clause on both sides.
pub fn corpus(n: usize, seed: u64) -> (Vec<Sig>, Vec<Pair>) {
    let sigs = corpus_signatures();
    let mut pairs = Vec::with_capacity(n);
    let mut rng = SplitMix64::new(seed);
    for k in 0..n {
        let sig_index = rng.below(sigs.len() as u64) as usize;
        let mut g = Gen::new(&sigs[sig_index], rng.next_u64());
        let m = g.formula(3);
        let s = match k % 3 {
            0 => g.rewrite(&m),
            1 => g.mutate(&m),
            _ => g.formula(3),
        };
        let (model, student) = if g.rng.chance(0.25) {
            let shared = g.formula(1);
            let shared_rw = g.rewrite(&shared);
            (vec![shared, m], vec![s, shared_rw])
        } else {
            (vec![m], vec![s])
        };
        pairs.push(Pair { sig_index, model, student });
    }
    (sigs, pairs)
}

/// Free variable names of a formula (binders excluded).
pub fn free_vars(f: &F) -> BTreeSet<String> {
    fn t(x: &T, bound: &[String], out: &mut BTreeSet<String>) {
        match x {
            T::Lit(_) => {}
            T::Var(n) | T::Len(n) => {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
            T::Idx(a, i) => {
                out.insert(a.clone());
                t(i, bound, out);
            }
            T::Neg(a) => t(a, bound, out),
            T::Bin(_, l, r) => {
                t(l, bound, out);
                t(r, bound, out);
            }
        }
    }
    fn go(f: &F, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            F::Const(_) => {}
            F::BVar(n) | F::Null(n, _) => {
                out.insert(n.clone());
            }
            F::Cmp(_, l, r) => {
                t(l, bound, out);
                t(r, bound, out);
            }
            F::Not(x) => go(x, bound, out),
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            F::Quant { array, binder, body, .. } => {
                out.insert(array.clone());
                bound.push(binder.clone());
                go(body, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}
