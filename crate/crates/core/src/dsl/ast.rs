//! Typed AST shared by the parser, the checking backends and the AST document format.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the implicit variable holding a method's return value in post-conditions.
pub const RETVAL: &str = "retval";

/// Value types of the specification language.
///
/// Numeric types are ordered by the coercion relation `Short < Int < Long < Float < Double`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Short,
    Int,
    Long,
    Float,
    Double,
    Bool,
    Array(Box<Type>),
}

impl Type {
    pub fn array_of(elem: Type) -> Type {
        Type::Array(Box::new(elem))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Type::Short | Type::Int | Type::Long | Type::Float | Type::Double)
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, Type::Short | Type::Int | Type::Long)
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Type::Float | Type::Double)
    }

    pub fn is_array(&self) -> bool {
        matches!(self, Type::Array(_))
    }

    /// Element type of an array type.
    pub fn element(&self) -> Option<&Type> {
        match self {
            Type::Array(e) => Some(e),
            _ => None,
        }
    }

    /// Number of array dimensions (0 for scalars).
    pub fn depth(&self) -> usize {
        match self {
            Type::Array(e) => 1 + e.depth(),
            _ => 0,
        }
    }

    /// Innermost scalar type.
    pub fn scalar(&self) -> &Type {
        match self {
            Type::Array(e) => e.scalar(),
            t => t,
        }
    }

    fn numeric_rank(&self) -> Option<u8> {
        match self {
            Type::Short => Some(0),
            Type::Int => Some(1),
            Type::Long => Some(2),
            Type::Float => Some(3),
            Type::Double => Some(4),
            _ => None,
        }
    }

    /// Whether a value of `self` may be implicitly widened to `other`.
    pub fn coerces_to(&self, other: &Type) -> bool {
        match (self.numeric_rank(), other.numeric_rank()) {
            (Some(a), Some(b)) => a <= b,
            _ => self == other,
        }
    }

    /// Result type of a binary arithmetic operation (binary numeric promotion).
    pub fn promote(a: &Type, b: &Type) -> Option<Type> {
        let (ra, rb) = (a.numeric_rank()?, b.numeric_rank()?);
        let wider = if ra >= rb { a } else { b };
        Some(if *wider == Type::Short { Type::Int } else { wider.clone() })
    }

    /// Whether every array dimension bottoms out in a numeric scalar.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Type::Array(e) => e.scalar().is_numeric(),
            _ => true,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Short => f.write_str("short"),
            Type::Int => f.write_str("int"),
            Type::Long => f.write_str("long"),
            Type::Float => f.write_str("float"),
            Type::Double => f.write_str("double"),
            Type::Bool => f.write_str("bool"),
            Type::Array(e) => write!(f, "{e}[]"),
        }
    }
}

/// Byte range plus the line/column (1-based) of its start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end.max(self.end), line: self.line, col: self.col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Or,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub const ALL: [BinOp; 13] = [
        BinOp::And,
        BinOp::Or,
        BinOp::Eq,
        BinOp::Neq,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
    ];

    pub fn is_connective(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_equality(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Neq)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod)
    }

    /// The operator whose result is the boolean negation of this one.
    pub fn negated(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Eq => BinOp::Neq,
            BinOp::Neq => BinOp::Eq,
            BinOp::Lt => BinOp::Ge,
            BinOp::Le => BinOp::Gt,
            BinOp::Gt => BinOp::Le,
            BinOp::Ge => BinOp::Lt,
            _ => return None,
        })
    }

    /// Surface syntax.
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Eq => "==",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    /// Tag used in AST documents.
    pub fn tag(self) -> &'static str {
        match self {
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Eq => "eq",
            BinOp::Neq => "neq",
            BinOp::Lt => "lt",
            BinOp::Le => "le",
            BinOp::Gt => "gt",
            BinOp::Ge => "ge",
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
        }
    }

    pub fn from_tag(tag: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.tag() == tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantKind {
    Forall,
    Exists,
}

impl QuantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            QuantKind::Forall => "forall",
            QuantKind::Exists => "exists",
        }
    }

    pub fn dual(self) -> QuantKind {
        match self {
            QuantKind::Forall => QuantKind::Exists,
            QuantKind::Exists => QuantKind::Forall,
        }
    }
}

/// Expression node. Equality and ordering are structural: spans are ignored, resolved
/// types are compared.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Option<Type>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Int(i64),
    Real(f64),
    Bool(bool),
    Null,
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Imp(Box<Expr>, Box<Expr>),
    Length(Box<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Quant { kind: QuantKind, array: Box<Expr>, binder: String, body: Box<Expr> },
}

impl ExprKind {
    fn rank(&self) -> u8 {
        match self {
            ExprKind::Bool(_) => 0,
            ExprKind::Int(_) => 1,
            ExprKind::Real(_) => 2,
            ExprKind::Null => 3,
            ExprKind::Var(_) => 4,
            ExprKind::Length(_) => 5,
            ExprKind::Index(..) => 6,
            ExprKind::Unary(..) => 7,
            ExprKind::Binary(..) => 8,
            ExprKind::Imp(..) => 9,
            ExprKind::Quant { .. } => 10,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr { kind, ty: None, span: Span::default() }
    }

    pub fn with_span(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, ty: None, span }
    }

    pub fn typed(kind: ExprKind, ty: Type, span: Span) -> Expr {
        Expr { kind, ty: Some(ty), span }
    }

    pub fn bool_lit(b: bool) -> Expr {
        Expr::typed(ExprKind::Bool(b), Type::Bool, Span::default())
    }

    pub fn int(v: i64) -> Expr {
        Expr::new(ExprKind::Int(v))
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::new(ExprKind::Var(name.into()))
    }

    pub fn not(e: Expr) -> Expr {
        let ty = e.ty.as_ref().map(|_| Type::Bool);
        Expr { kind: ExprKind::Unary(UnOp::Not, Box::new(e)), ty, span: Span::default() }
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        let ty = if op.is_connective() && l.ty.is_some() && r.ty.is_some() {
            Some(Type::Bool)
        } else {
            None
        };
        Expr { kind: ExprKind::Binary(op, Box::new(l), Box::new(r)), ty, span: Span::default() }
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::And, l, r)
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Or, l, r)
    }

    pub fn imp(a: Expr, c: Expr) -> Expr {
        let ty = (a.ty.is_some() && c.ty.is_some()).then_some(Type::Bool);
        Expr { kind: ExprKind::Imp(Box::new(a), Box::new(c)), ty, span: Span::default() }
    }

    pub fn is_bool_lit(&self, value: bool) -> bool {
        matches!(self.kind, ExprKind::Bool(b) if b == value)
    }

    /// Direct children in source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Real(_) | ExprKind::Bool(_) | ExprKind::Null | ExprKind::Var(_) => {
                vec![]
            }
            ExprKind::Unary(_, e) | ExprKind::Length(e) => vec![e],
            ExprKind::Binary(_, l, r) | ExprKind::Imp(l, r) | ExprKind::Index(l, r) => vec![l, r],
            ExprKind::Quant { array, body, .. } => vec![array, body],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Free variable names, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        fn go(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match &e.kind {
                ExprKind::Var(n) => {
                    if !bound.contains(n) && !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                ExprKind::Quant { array, binder, body, .. } => {
                    go(array, bound, out);
                    bound.push(binder.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in e.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Deterministic structural order: node kind, then operator, then children
    /// lexicographically. Spans are ignored.
    pub fn structural_cmp(&self, other: &Expr) -> Ordering {
        let by_kind = self.kind.rank().cmp(&other.kind.rank());
        if by_kind != Ordering::Equal {
            return by_kind;
        }
        let head = match (&self.kind, &other.kind) {
            (ExprKind::Int(a), ExprKind::Int(b)) => a.cmp(b),
            (ExprKind::Real(a), ExprKind::Real(b)) => a.total_cmp(b),
            (ExprKind::Bool(a), ExprKind::Bool(b)) => a.cmp(b),
            (ExprKind::Var(a), ExprKind::Var(b)) => a.cmp(b),
            (ExprKind::Unary(a, _), ExprKind::Unary(b, _)) => a.cmp(b),
            (ExprKind::Binary(a, ..), ExprKind::Binary(b, ..)) => a.cmp(b),
            (ExprKind::Quant { kind: a, binder: x, .. }, ExprKind::Quant { kind: b, binder: y, .. }) => {
                a.cmp(b).then_with(|| x.cmp(y))
            }
            _ => Ordering::Equal,
        };
        if head != Ordering::Equal {
            return head;
        }
        let (mine, theirs) = (self.children(), other.children());
        for (a, b) in mine.iter().zip(theirs.iter()) {
            let c = a.structural_cmp(b);
            if c != Ordering::Equal {
                return c;
            }
        }
        mine.len().cmp(&theirs.len()).then_with(|| self.ty.cmp(&other.ty))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.structural_cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.structural_cmp(other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

/// Method header a specification is written against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub method: String,
    pub params: Vec<Param>,
    /// `None` for `void`.
    pub returns: Option<Type>,
}

impl Signature {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Variables an assignment must bind for a pre-condition (`with_retval = false`) or a
    /// post-condition (`with_retval = true`).
    pub fn variables(&self, with_retval: bool) -> Vec<(String, Type)> {
        let mut vars: Vec<(String, Type)> =
            self.params.iter().map(|p| (p.name.clone(), p.ty.clone())).collect();
        if with_retval {
            if let Some(t) = &self.returns {
                vars.push((RETVAL.to_string(), t.clone()));
            }
        }
        vars
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "method {}(", self.method)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", p.name, p.ty)?;
        }
        match &self.returns {
            Some(t) => write!(f, ") -> {t};"),
            None => f.write_str(") -> void;"),
        }
    }
}

/// A method signature with its pre- and post-condition clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    pub signature: Signature,
    pub pres: Vec<Expr>,
    pub posts: Vec<Expr>,
}

impl Specification {
    pub fn pre(&self) -> Expr {
        conjoin(&self.pres)
    }

    pub fn post(&self) -> Expr {
        conjoin(&self.posts)
    }
}

/// Right-nested conjunction of `clauses` in order; the empty conjunction is `true`.
pub fn conjoin(clauses: &[Expr]) -> Expr {
    match clauses.split_last() {
        None => Expr::bool_lit(true),
        Some((last, init)) => init
            .iter()
            .rev()
            .fold(last.clone(), |acc, c| Expr::and(c.clone(), acc)),
    }
}
