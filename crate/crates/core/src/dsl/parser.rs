//! Recursive-descent parser for specification files.
//!
//! ```text
//! spec   := header clause*
//! header := "method" ident "(" [param ("," param)*] ")" "->" type ";"
//! param  := ident ":" type
//! type   := ("int"|"short"|"long"|"float"|"double"|"bool") "[]"* | "void"
//! clause := ("pre"|"post") "(" expr ")" ";"
//! ```
//!
//! Expression precedence, loosest first: `||`, `&&`, `== !=`, `< <= > >=`, `+ -`,
//! `* / %`, prefix `! -`, postfix `.length` and `[i]`. `imp`, `forall` and `exists` are
//! written in call form. Errors never abort parsing: the parser resynchronizes at the
//! next `;` and keeps collecting diagnostics.

use super::ast::*;
use super::diag::{Diagnostic, DiagnosticKind, Diagnostics};
use super::lexer::{lex, Tok, Token};

const KEYWORDS: &[&str] = &[
    "method", "pre", "post", "true", "false", "null", "forall", "exists", "imp", "void", "int",
    "short", "long", "float", "double", "bool",
];

/// Parses a whole specification (header plus clauses).
pub fn parse(src: &str) -> Result<Specification, Diagnostics> {
    let (tokens, mut diags) = lex(src);
    let mut p = Parser { toks: tokens, pos: 0, diags: Vec::new() };
    let spec = p.spec();
    diags.append(&mut p.diags);
    match spec {
        Some(s) if diags.is_empty() => Ok(s),
        _ => {
            if diags.is_empty() {
                diags.push(Diagnostic::syntax(p.peek().span, "missing method header"));
            }
            diags.sort_by_key(|d| d.span.start);
            Err(Diagnostics(diags))
        }
    }
}

/// Parses a single expression (no header, no clause keyword).
pub fn parse_expr(src: &str) -> Result<Expr, Diagnostics> {
    let (tokens, mut diags) = lex(src);
    let mut p = Parser { toks: tokens, pos: 0, diags: Vec::new() };
    let e = p.expr();
    if e.is_ok() && p.peek().tok != Tok::Eof {
        let t = p.peek().clone();
        p.diags.push(Diagnostic::syntax(t.span, format!("unexpected {} after expression", t.tok.describe())));
    }
    diags.append(&mut p.diags);
    match e {
        Ok(e) if diags.is_empty() => Ok(e),
        _ => Err(Diagnostics(diags)),
    }
}

/// Parses a type such as `int[][]`; `Some(None)` is `void`.
pub fn parse_type(src: &str) -> Option<Option<Type>> {
    let (tokens, diags) = lex(src);
    if !diags.is_empty() {
        return None;
    }
    let mut p = Parser { toks: tokens, pos: 0, diags: Vec::new() };
    let t = p.ty().ok()?;
    (p.peek().tok == Tok::Eof).then_some(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

/// Marker for "a diagnostic was recorded; unwind to the recovery point".
struct Bail;

type PResult<T> = Result<T, Bail>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == word)
    }

    fn error<T>(&mut self, kind: DiagnosticKind, span: Span, msg: impl Into<String>) -> PResult<T> {
        self.diags.push(Diagnostic::new(kind, span, msg));
        Err(Bail)
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let t = self.peek().clone();
        self.error(
            DiagnosticKind::Syntax,
            t.span,
            format!("expected {expected}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            let t = self.peek().clone();
            self.error(
                DiagnosticKind::Syntax,
                t.span,
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
            )
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().tok.clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            Tok::Ident(s) => {
                let span = self.peek().span;
                self.error(DiagnosticKind::Syntax, span, format!("`{s}` is a reserved word and cannot be used as {what}"))
            }
            _ => self.unexpected(what),
        }
    }

    /// Skips to just past the next `;` (or to end of input).
    fn recover(&mut self) {
        loop {
            match self.bump().tok {
                Tok::Semi | Tok::Eof => return,
                _ => {}
            }
        }
    }

    fn spec(&mut self) -> Option<Specification> {
        let mut signature: Option<Signature> = None;
        let mut pres = Vec::new();
        let mut posts = Vec::new();
        while self.peek().tok != Tok::Eof {
            if self.is_ident("method") {
                let start = self.peek().span;
                match self.header() {
                    Ok(sig) if signature.is_none() => signature = Some(sig),
                    Ok(_) => {
                        self.diags.push(Diagnostic::new(
                            DiagnosticKind::DuplicateSignature,
                            start,
                            "duplicate method header; a specification has exactly one",
                        ));
                    }
                    Err(Bail) => self.recover(),
                }
            } else if self.is_ident("pre") || self.is_ident("post") {
                let is_pre = self.is_ident("pre");
                if signature.is_none() {
                    let span = self.peek().span;
                    self.diags.push(Diagnostic::syntax(span, "clause before method header"));
                }
                match self.clause() {
                    Ok(e) if is_pre => pres.push(e),
                    Ok(e) => posts.push(e),
                    Err(Bail) => self.recover(),
                }
            } else {
                let t = self.peek().clone();
                let kind = if matches!(t.tok, Tok::Ident(_)) {
                    DiagnosticKind::UnknownConstruct
                } else {
                    DiagnosticKind::Syntax
                };
                self.diags.push(Diagnostic::new(
                    kind,
                    t.span,
                    format!("expected `method`, `pre` or `post`, found {}", t.tok.describe()),
                ));
                self.recover();
            }
        }
        signature.map(|signature| Specification { signature, pres, posts })
    }

    fn header(&mut self) -> PResult<Signature> {
        self.bump(); // method
        let (method, _) = self.ident("a method name")?;
        self.expect(Tok::LParen)?;
        let mut params: Vec<Param> = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let (name, span) = self.ident("a parameter name")?;
                if name == RETVAL {
                    return self.error(DiagnosticKind::Syntax, span, "`retval` cannot be a parameter name");
                }
                if params.iter().any(|p| p.name == name) {
                    return self.error(DiagnosticKind::Syntax, span, format!("duplicate parameter `{name}`"));
                }
                self.expect(Tok::Colon)?;
                let tspan = self.peek().span;
                let Some(ty) = self.ty()? else {
                    return self.error(DiagnosticKind::Type, tspan, "parameters cannot have type void");
                };
                params.push(Param { name, ty });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let returns = self.ty()?;
        self.expect(Tok::Semi)?;
        Ok(Signature { method, params, returns })
    }

    /// `Ok(None)` is `void`.
    fn ty(&mut self) -> PResult<Option<Type>> {
        let t = self.peek().clone();
        let base = match &t.tok {
            Tok::Ident(s) => match s.as_str() {
                "void" => {
                    self.bump();
                    return Ok(None);
                }
                "int" => Type::Int,
                "short" => Type::Short,
                "long" => Type::Long,
                "float" => Type::Float,
                "double" => Type::Double,
                "bool" => Type::Bool,
                _ => return self.unexpected("a type"),
            },
            _ => return self.unexpected("a type"),
        };
        self.bump();
        let mut ty = base;
        while self.peek().tok == Tok::LBracket {
            self.bump();
            self.expect(Tok::RBracket)?;
            ty = Type::array_of(ty);
        }
        if !ty.is_well_formed() {
            return self.error(DiagnosticKind::Type, t.span, format!("arrays of bool are not supported (`{ty}`)"));
        }
        Ok(Some(ty))
    }

    fn clause(&mut self) -> PResult<Expr> {
        self.bump(); // pre / post
        self.expect(Tok::LParen)?;
        let e = self.expr()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Semi)?;
        Ok(e)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[(Tok, BinOp)]] = &[
            &[(Tok::OrOr, BinOp::Or)],
            &[(Tok::AndAnd, BinOp::And)],
            &[(Tok::EqEq, BinOp::Eq), (Tok::NotEq, BinOp::Neq)],
            &[(Tok::Lt, BinOp::Lt), (Tok::Le, BinOp::Le), (Tok::Gt, BinOp::Gt), (Tok::Ge, BinOp::Ge)],
            &[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)],
            &[(Tok::Star, BinOp::Mul), (Tok::Slash, BinOp::Div), (Tok::Percent, BinOp::Mod)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            let Some(&(_, op)) = LEVELS[level].iter().find(|(t, _)| *t == self.peek().tok) else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.binary_level(level + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::with_span(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Bang => {
                self.bump();
                let e = self.unary()?;
                let span = t.span.to(e.span);
                Ok(Expr::with_span(ExprKind::Unary(UnOp::Not, Box::new(e)), span))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().tok.clone() {
                    Tok::Int(v) => {
                        let lit = self.bump();
                        let value = if v == 1u64 << 63 {
                            i64::MIN
                        } else if let Ok(v) = i64::try_from(v) {
                            -v
                        } else {
                            return self.error(DiagnosticKind::Syntax, lit.span, "integer literal out of range");
                        };
                        self.postfix(Expr::with_span(ExprKind::Int(value), t.span.to(lit.span)))
                    }
                    Tok::Real(v) => {
                        let lit = self.bump();
                        self.postfix(Expr::with_span(ExprKind::Real(-v), t.span.to(lit.span)))
                    }
                    _ => {
                        let e = self.unary()?;
                        let span = t.span.to(e.span);
                        Ok(Expr::with_span(ExprKind::Unary(UnOp::Neg, Box::new(e)), span))
                    }
                }
            }
            _ => {
                let e = self.primary()?;
                self.postfix(e)
            }
        }
    }

    fn postfix(&mut self, mut e: Expr) -> PResult<Expr> {
        loop {
            match self.peek().tok {
                Tok::Dot => {
                    self.bump();
                    let t = self.peek().clone();
                    match &t.tok {
                        Tok::Ident(s) if s == "length" => {
                            self.bump();
                            let span = e.span.to(t.span);
                            e = Expr::with_span(ExprKind::Length(Box::new(e)), span);
                        }
                        Tok::Ident(s) => {
                            let msg = format!("unknown member `.{s}`; only `.length` is supported");
                            return self.error(DiagnosticKind::UnknownConstruct, t.span, msg);
                        }
                        _ => return self.unexpected("`length`"),
                    }
                }
                Tok::LBracket => {
                    self.bump();
                    let idx = self.expr()?;
                    let close = self.expect(Tok::RBracket)?;
                    let span = e.span.to(close.span);
                    e = Expr::with_span(ExprKind::Index(Box::new(e), Box::new(idx)), span);
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(v) => {
                self.bump();
                match i64::try_from(*v) {
                    Ok(v) => Ok(Expr::with_span(ExprKind::Int(v), t.span)),
                    Err(_) => self.error(DiagnosticKind::Syntax, t.span, "integer literal out of range"),
                }
            }
            Tok::Real(v) => {
                self.bump();
                Ok(Expr::with_span(ExprKind::Real(*v), t.span))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::with_span(ExprKind::Bool(word == "true"), t.span))
                }
                "null" => {
                    self.bump();
                    Ok(Expr::with_span(ExprKind::Null, t.span))
                }
                "forall" | "exists" => {
                    let kind = if word == "forall" { QuantKind::Forall } else { QuantKind::Exists };
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let array = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let (binder, _) = self.ident("a bound variable name")?;
                    if binder == RETVAL {
                        return self.error(DiagnosticKind::Syntax, t.span, "`retval` cannot be bound by a quantifier");
                    }
                    self.expect(Tok::Arrow)?;
                    let body = self.expr()?;
                    let close = self.expect(Tok::RParen)?;
                    Ok(Expr::with_span(
                        ExprKind::Quant { kind, array: Box::new(array), binder, body: Box::new(body) },
                        t.span.to(close.span),
                    ))
                }
                "imp" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let c = self.expr()?;
                    let close = self.expect(Tok::RParen)?;
                    Ok(Expr::with_span(ExprKind::Imp(Box::new(a), Box::new(c)), t.span.to(close.span)))
                }
                w if KEYWORDS.contains(&w) => self.unexpected("an expression"),
                _ => {
                    self.bump();
                    if self.peek().tok == Tok::LParen {
                        let msg = format!("unknown construct `{word}(...)`; expected forall, exists or imp");
                        return self.error(DiagnosticKind::UnknownConstruct, t.span, msg);
                    }
                    if *self.peek_at(0) == Tok::Arrow {
                        return self.error(DiagnosticKind::Syntax, t.span, "lambda is only allowed inside forall/exists");
                    }
                    Ok(Expr::with_span(ExprKind::Var(word.clone()), t.span))
                }
            },
            _ => self.unexpected("an expression"),
        }
    }
}
