//! JSON document form of expressions and specifications, used by the block editor and
//! for persistence.
//!
//! Expression node:
//!
//! ```json
//! { "kind": "lt", "type": "bool", "children": [ {"kind": "var", "name": "x"}, {"kind": "int", "value": 0} ] }
//! ```
//!
//! | kind                                   | payload                          |
//! |----------------------------------------|----------------------------------|
//! | `int`, `real`, `bool`                  | `value`                          |
//! | `null`                                 | -                                |
//! | `var`                                  | `name`                           |
//! | `not`, `neg`, `length`                 | `children` (1)                   |
//! | `and` `or` `eq` `neq` `lt` `le` `gt` `ge` `add` `sub` `mul` `div` `mod`, `imp`, `index` | `children` (2) |
//! | `forall`, `exists`                     | `name` (binder), `children` (array, body) |
//!
//! `type` (e.g. `"int[][]"`) is optional on input and always written for typechecked trees.
//! `span` (`{start, end, line, col}`) is optional and passed through untouched.
//!
//! Specification: `{ "signature": {"method", "params": [{"name", "type"}], "returns"}, "pres": [..], "posts": [..] }`.

use serde_json::{json, Map, Value};

use super::ast::*;
use super::parser::parse_type;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unknown node kind `{0}`")]
    UnknownKind(String),
    #[error("`{kind}` takes {expected} children, found {found}")]
    Arity { kind: String, expected: usize, found: usize },
    #[error("invalid type `{0}`")]
    BadType(String),
}

fn type_string(t: Option<&Type>) -> String {
    t.map(|t| t.to_string()).unwrap_or_else(|| "void".to_string())
}

pub fn expr_to_doc(e: &Expr) -> Value {
    let mut m = Map::new();
    let kind = match &e.kind {
        ExprKind::Int(v) => {
            m.insert("value".into(), json!(v));
            "int"
        }
        ExprKind::Real(v) => {
            m.insert("value".into(), json!(v));
            "real"
        }
        ExprKind::Bool(b) => {
            m.insert("value".into(), json!(b));
            "bool"
        }
        ExprKind::Null => "null",
        ExprKind::Var(n) => {
            m.insert("name".into(), json!(n));
            "var"
        }
        ExprKind::Unary(UnOp::Not, _) => "not",
        ExprKind::Unary(UnOp::Neg, _) => "neg",
        ExprKind::Binary(op, ..) => op.tag(),
        ExprKind::Imp(..) => "imp",
        ExprKind::Length(_) => "length",
        ExprKind::Index(..) => "index",
        ExprKind::Quant { kind, binder, .. } => {
            m.insert("name".into(), json!(binder));
            kind.keyword()
        }
    };
    m.insert("kind".into(), json!(kind));
    if let Some(t) = &e.ty {
        m.insert("type".into(), json!(t.to_string()));
    }
    let children = e.children();
    if !children.is_empty() {
        m.insert("children".into(), Value::Array(children.into_iter().map(expr_to_doc).collect()));
    }
    if e.span != Span::default() {
        m.insert("span".into(), serde_json::to_value(e.span).expect("span serializes"));
    }
    Value::Object(m)
}

pub fn expr_from_doc(v: &Value) -> Result<Expr, DocError> {
    let obj = v.as_object().ok_or_else(|| DocError::Malformed("expression node must be an object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| DocError::Malformed("node without a string `kind`".into()))?;
    let ty = match obj.get("type") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => match parse_type(s) {
            Some(Some(t)) => Some(t),
            _ => return Err(DocError::BadType(s.clone())),
        },
        Some(other) => return Err(DocError::BadType(other.to_string())),
    };
    let span = match obj.get("span") {
        None | Some(Value::Null) => Span::default(),
        Some(s) => serde_json::from_value(s.clone()).map_err(|e| DocError::Malformed(format!("bad span: {e}")))?,
    };
    let children: Vec<Expr> = match obj.get("children") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(cs)) => cs.iter().map(expr_from_doc).collect::<Result<_, _>>()?,
        Some(_) => return Err(DocError::Malformed("`children` must be an array".into())),
    };
    let arity = |expected: usize| -> Result<(), DocError> {
        if children.len() == expected {
            Ok(())
        } else {
            Err(DocError::Arity { kind: kind.to_string(), expected, found: children.len() })
        }
    };
    let name = || -> Result<String, DocError> {
        obj.get("name")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| DocError::Malformed(format!("`{kind}` node needs a string `name`")))
    };
    let value = || obj.get("value").ok_or_else(|| DocError::Malformed(format!("`{kind}` node needs a `value`")));

    let mut it = children.clone().into_iter();
    let mut next = || Box::new(it.next().expect("arity checked"));
    let node = match kind {
        "int" => {
            arity(0)?;
            ExprKind::Int(value()?.as_i64().ok_or_else(|| DocError::Malformed("`int` value must be a 64-bit integer".into()))?)
        }
        "real" => {
            arity(0)?;
            ExprKind::Real(value()?.as_f64().ok_or_else(|| DocError::Malformed("`real` value must be a number".into()))?)
        }
        "bool" => {
            arity(0)?;
            ExprKind::Bool(value()?.as_bool().ok_or_else(|| DocError::Malformed("`bool` value must be a boolean".into()))?)
        }
        "null" => {
            arity(0)?;
            ExprKind::Null
        }
        "var" => {
            arity(0)?;
            ExprKind::Var(name()?)
        }
        "not" | "neg" => {
            arity(1)?;
            ExprKind::Unary(if kind == "not" { UnOp::Not } else { UnOp::Neg }, next())
        }
        "length" => {
            arity(1)?;
            ExprKind::Length(next())
        }
        "imp" => {
            arity(2)?;
            let a = next();
            ExprKind::Imp(a, next())
        }
        "index" => {
            arity(2)?;
            let a = next();
            ExprKind::Index(a, next())
        }
        "forall" | "exists" => {
            arity(2)?;
            let q = if kind == "forall" { QuantKind::Forall } else { QuantKind::Exists };
            let array = next();
            ExprKind::Quant { kind: q, array, binder: name()?, body: next() }
        }
        other => match BinOp::from_tag(other) {
            Some(op) => {
                arity(2)?;
                let l = next();
                ExprKind::Binary(op, l, next())
            }
            None => return Err(DocError::UnknownKind(other.to_string())),
        },
    };
    Ok(Expr { kind: node, ty, span })
}

pub fn spec_to_doc(spec: &Specification) -> Value {
    let sig = &spec.signature;
    json!({
        "signature": {
            "method": sig.method,
            "params": sig.params.iter().map(|p| json!({"name": p.name, "type": p.ty.to_string()})).collect::<Vec<_>>(),
            "returns": type_string(sig.returns.as_ref()),
        },
        "pres": spec.pres.iter().map(expr_to_doc).collect::<Vec<_>>(),
        "posts": spec.posts.iter().map(expr_to_doc).collect::<Vec<_>>(),
    })
}

pub fn signature_from_doc(v: &Value) -> Result<Signature, DocError> {
    let method = v
        .get("method")
        .and_then(Value::as_str)
        .ok_or_else(|| DocError::Malformed("signature needs a string `method`".into()))?;
    let params = v
        .get("params")
        .and_then(Value::as_array)
        .ok_or_else(|| DocError::Malformed("signature needs a `params` array".into()))?
        .iter()
        .map(|p| {
            let name = p.get("name").and_then(Value::as_str).ok_or_else(|| DocError::Malformed("param needs a `name`".into()))?;
            let ts = p.get("type").and_then(Value::as_str).ok_or_else(|| DocError::Malformed("param needs a `type`".into()))?;
            match parse_type(ts) {
                Some(Some(ty)) => Ok(Param { name: name.to_string(), ty }),
                _ => Err(DocError::BadType(ts.to_string())),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rs = v.get("returns").and_then(Value::as_str).unwrap_or("void");
    let returns = parse_type(rs).ok_or_else(|| DocError::BadType(rs.to_string()))?;
    Ok(Signature { method: method.to_string(), params, returns })
}

/// Reads a specification document. When `signature` is absent, `fallback` is used (the
/// block editor may submit clause trees only).
pub fn spec_from_doc(v: &Value, fallback: Option<&Signature>) -> Result<Specification, DocError> {
    let signature = match (v.get("signature"), fallback) {
        (Some(s), _) => signature_from_doc(s)?,
        (None, Some(f)) => f.clone(),
        (None, None) => return Err(DocError::Malformed("specification needs a `signature`".into())),
    };
    let clauses = |key: &str| -> Result<Vec<Expr>, DocError> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(items)) => items.iter().map(expr_from_doc).collect(),
            Some(_) => Err(DocError::Malformed(format!("`{key}` must be an array"))),
        }
    };
    Ok(Specification { signature, pres: clauses("pres")?, posts: clauses("posts")? })
}
