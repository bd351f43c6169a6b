//! Rebuilding an [`Assignment`] from a `sat` answer with `(get-value ...)` queries.

use super::encode::{base_name, Path};
use super::process::Session;
use super::sexpr::Sexp;
use super::SmtError;
use crate::dsl::Type;
use crate::eval::{Assignment, Value};

/// `Ok(None)` when the model does not fit a concrete assignment: more than `cap` array
/// elements in total, or integers outside 64 bits.
pub(crate) fn read_model(sess: &mut Session, vars: &[(String, Type)], cap: usize) -> Result<Option<Assignment>, SmtError> {
    let scalars: Vec<&(String, Type)> = vars.iter().filter(|(_, t)| !t.is_array()).collect();
    let terms: Vec<String> = scalars.iter().map(|(n, _)| base_name(n)).collect();
    let values = sess.get_values(&terms)?;
    let mut a = Assignment::new();
    for ((name, ty), v) in scalars.into_iter().zip(values) {
        match scalar(&v, ty)? {
            Some(v) => a.insert(name.clone(), v),
            None => return Ok(None),
        }
    }
    let mut budget = cap;
    for (name, ty) in vars.iter().filter(|(_, t)| t.is_array()) {
        match array(sess, &Path::root(base_name(name), ty), &mut budget)? {
            Some(v) => a.insert(name.clone(), v),
            None => return Ok(None),
        }
    }
    Ok(Some(a))
}

fn scalar(v: &Sexp, ty: &Type) -> Result<Option<Value>, SmtError> {
    let bad = || SmtError::Protocol(format!("cannot read {v} as {ty}"));
    Ok(match ty {
        t if t.is_integral() => {
            let i = v.as_int().ok_or_else(bad)?;
            match i64::try_from(i) {
                Ok(i) if Value::Int(i).conforms(t) => Some(Value::Int(i)),
                _ => None,
            }
        }
        t if t.is_real() => Some(Value::Real(v.as_real().ok_or_else(bad)?)),
        _ => Some(Value::Bool(v.as_bool().ok_or_else(bad)?)),
    })
}

fn array(sess: &mut Session, p: &Path, budget: &mut usize) -> Result<Option<Value>, SmtError> {
    let head = sess.get_values(&[p.null(), p.len()])?;
    if head[0].as_bool() == Some(true) {
        return Ok(Some(Value::Null));
    }
    let len = head[1].as_int().ok_or_else(|| SmtError::Protocol(format!("bad length {}", head[1])))?;
    let Ok(len) = usize::try_from(len) else { return Ok(None) };
    if len > *budget {
        return Ok(None);
    }
    *budget -= len;
    let mut items = Vec::with_capacity(len);
    if p.holds_scalars() {
        let terms: Vec<String> = (0..len).map(|j| p.element(j.to_string())).collect();
        for v in sess.get_values(&terms)? {
            match scalar(&v, &p.elem)? {
                Some(v) => items.push(v),
                None => return Ok(None),
            }
        }
    } else {
        for j in 0..len {
            match array(sess, &p.child(j.to_string()), budget)? {
                Some(v) => items.push(v),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(Value::Array(items)))
}
