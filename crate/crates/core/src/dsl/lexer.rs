use super::ast::Span;
use super::diag::Diagnostic;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Unsigned magnitude; a leading `-` is folded by the parser.
    Int(u64),
    Real(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Arrow,
    Dot,
    Bang,
    AndAnd,
    OrOr,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Real(v) => format!("`{v:?}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Arrow => "->",
            Tok::Dot => ".",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Tokenizes `src`. Unrecognized characters produce a diagnostic and are skipped, so the
/// token stream is always complete and ends with `Eof`.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1u32, 0usize);

    while i < bytes.len() {
        let c = bytes[i];
        let span_at = |start: usize, end: usize| Span {
            start,
            end,
            line,
            col: (src[line_start..start].chars().count() + 1) as u32,
        };
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: span_at(start, i) });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_real = false;
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                is_real = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_real = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let span = span_at(start, i);
            if is_real {
                match text.parse::<f64>() {
                    Ok(v) => toks.push(Token { tok: Tok::Real(v), span }),
                    Err(_) => diags.push(Diagnostic::syntax(span, format!("invalid real literal `{text}`"))),
                }
            } else {
                match text.parse::<u64>() {
                    Ok(v) => toks.push(Token { tok: Tok::Int(v), span }),
                    Err(_) => diags.push(Diagnostic::syntax(span, format!("integer literal `{text}` out of range"))),
                }
            }
            continue;
        }
        let two = |a: u8, b: u8| c == a && bytes.get(i + 1) == Some(&b);
        let (tok, len) = if two(b'-', b'>') {
            (Tok::Arrow, 2)
        } else if two(b'&', b'&') {
            (Tok::AndAnd, 2)
        } else if two(b'|', b'|') {
            (Tok::OrOr, 2)
        } else if two(b'=', b'=') {
            (Tok::EqEq, 2)
        } else if two(b'!', b'=') {
            (Tok::NotEq, 2)
        } else if two(b'<', b'=') {
            (Tok::Le, 2)
        } else if two(b'>', b'=') {
            (Tok::Ge, 2)
        } else {
            let t = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b':' => Tok::Colon,
                b'.' => Tok::Dot,
                b'!' => Tok::Bang,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'%' => Tok::Percent,
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    let end = i + ch.len_utf8();
                    diags.push(Diagnostic::syntax(span_at(i, end), format!("unexpected character `{ch}`")));
                    i = end;
                    continue;
                }
            };
            (t, 1)
        };
        i += len;
        toks.push(Token { tok, span: span_at(start, i) });
    }
    let col = (src[line_start..].chars().count() + 1) as u32;
    toks.push(Token { tok: Tok::Eof, span: Span { start: src.len(), end: src.len(), line, col } });
    (toks, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        let (t, d) = lex(src);
        assert!(d.is_empty(), "{d:?}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            kinds("a.length >= 10 && x != 2.5e-1 -> //c\n!"),
            vec![
                Tok::Ident("a".into()),
                Tok::Dot,
                Tok::Ident("length".into()),
                Tok::Ge,
                Tok::Int(10),
                Tok::AndAnd,
                Tok::Ident("x".into()),
                Tok::NotEq,
                Tok::Real(0.25),
                Tok::Arrow,
                Tok::Bang,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let (t, _) = lex("x\n  yy");
        assert_eq!((t[1].span.line, t[1].span.col), (2, 3));
    }

    #[test]
    fn bad_characters_are_reported_and_skipped() {
        let (t, d) = lex("x # y");
        assert_eq!(d.len(), 1);
        assert_eq!(t.len(), 3);
    }
}
