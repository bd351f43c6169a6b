//! Minimal S-expression reader for solver responses.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }

    /// Integer literal: `12`, `(- 12)`.
    pub fn as_int(&self) -> Option<i128> {
        match self {
            Sexp::Atom(a) => a.parse().ok(),
            Sexp::List(items) => match items.as_slice() {
                [Sexp::Atom(op), x] if op == "-" => x.as_int().map(|v| -v),
                _ => None,
            },
        }
    }

    /// Real literal: `1.5`, `(- 2.0)`, `(/ 1.0 3.0)`, or an integer literal.
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Sexp::Atom(a) => a.parse().ok(),
            Sexp::List(items) => match items.as_slice() {
                [Sexp::Atom(op), x] if op == "-" => x.as_real().map(|v| -v),
                [Sexp::Atom(op), n, d] if op == "/" => Some(n.as_real()? / d.as_real()?),
                [Sexp::Atom(op), x] if op == "to_real" => x.as_real(),
                _ => None,
            },
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.atom()? {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Net parenthesis depth of `text`, ignoring parentheses inside strings and quoted symbols.
pub fn depth(text: &str) -> i64 {
    let mut d = 0;
    let mut in_str = false;
    let mut in_quote = false;
    for c in text.chars() {
        match c {
            '"' if !in_quote => in_str = !in_str,
            '|' if !in_str => in_quote = !in_quote,
            '(' if !in_str && !in_quote => d += 1,
            ')' if !in_str && !in_quote => d -= 1,
            _ => {}
        }
    }
    d
}

pub fn parse_all(text: &str) -> Result<Vec<Sexp>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    while pos < chars.len() {
        let c = chars[pos];
        match c {
            c if c.is_whitespace() => pos += 1,
            ';' => {
                while pos < chars.len() && chars[pos] != '\n' {
                    pos += 1;
                }
            }
            '(' => {
                stack.push(Vec::new());
                pos += 1;
            }
            ')' => {
                if stack.len() < 2 {
                    return Err(format!("unbalanced `)` at offset {pos}"));
                }
                let done = stack.pop().unwrap();
                stack.last_mut().unwrap().push(Sexp::List(done));
                pos += 1;
            }
            '"' | '|' => {
                let start = pos;
                pos += 1;
                loop {
                    match chars.get(pos) {
                        None => return Err("unterminated literal".into()),
                        Some(&q) if q == c => {
                            if c == '"' && chars.get(pos + 1) == Some(&'"') {
                                pos += 2;
                                continue;
                            }
                            pos += 1;
                            break;
                        }
                        Some(_) => pos += 1,
                    }
                }
                stack.last_mut().unwrap().push(Sexp::Atom(chars[start..pos].iter().collect()));
            }
            _ => {
                let start = pos;
                while pos < chars.len() && !chars[pos].is_whitespace() && !"()\";".contains(chars[pos]) {
                    pos += 1;
                }
                stack.last_mut().unwrap().push(Sexp::Atom(chars[start..pos].iter().collect()));
            }
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let v = parse_all("((x (- 3)) (r (/ 1.0 4.0)) (p true) (s \"a ) b\"))").unwrap();
        let pairs = v[0].list().unwrap();
        assert_eq!(pairs[0].list().unwrap()[1].as_int(), Some(-3));
        assert_eq!(pairs[1].list().unwrap()[1].as_real(), Some(0.25));
        assert_eq!(pairs[2].list().unwrap()[1].as_bool(), Some(true));
        assert_eq!(pairs[3].list().unwrap()[1].atom(), Some("\"a ) b\""));
    }

    #[test]
    fn depth_and_errors() {
        assert_eq!(depth("((a \"(\" |)|"), 2);
        assert!(parse_all("(a").is_err());
        assert!(parse_all("a)").is_err());
        assert_eq!(parse_all("sat\n").unwrap(), vec![Sexp::Atom("sat".into())]);
        assert_eq!(Sexp::List(vec![Sexp::Atom("a".into()), Sexp::List(vec![])]).to_string(), "(a ())");
    }
}
