use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::Type;

/// Runtime value bound to a parameter or `retval`.
///
/// Every integral type (`short`, `int`, `long`) is carried as a 64-bit integer and every
/// real type as a 64-bit float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Array(Vec<Value>),
    Null,
}

impl Value {
    /// Whether this value can inhabit a slot of type `ty`.
    pub fn conforms(&self, ty: &Type) -> bool {
        match (self, ty) {
            (Value::Int(v), Type::Short) => i16::try_from(*v).is_ok(),
            (Value::Int(_), Type::Int | Type::Long) => true,
            (Value::Real(_), Type::Float | Type::Double) => true,
            (Value::Bool(_), Type::Bool) => true,
            (Value::Null, Type::Array(_)) => true,
            (Value::Array(items), Type::Array(elem)) => items.iter().all(|v| v.conforms(elem)),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v:?}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Null => f.write_str("null"),
            Value::Array(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Variable bindings for one evaluation, ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub BTreeMap<String, Value>);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, v: Value) {
        self.0.insert(name.into(), v);
    }

    pub fn with(mut self, name: impl Into<String>, v: Value) -> Assignment {
        self.insert(name, v);
        self
    }

    /// Checks that exactly the variables in `vars` are bound, each with a conforming value.
    pub fn check_shape(&self, vars: &[(String, Type)]) -> Result<(), String> {
        for (name, ty) in vars {
            match self.0.get(name) {
                None => return Err(format!("`{name}` is not bound")),
                Some(v) if !v.conforms(ty) => return Err(format!("`{name}` = {v} does not fit type `{ty}`")),
                Some(_) => {}
            }
        }
        if let Some(extra) = self.0.keys().find(|k| !vars.iter().any(|(n, _)| n == *k)) {
            return Err(format!("`{extra}` is not a variable of this signature"));
        }
        Ok(())
    }

    /// `name = literal` pairs, e.g. `a = [1, 2], retval = 2`.
    pub fn render(&self) -> BTreeMap<String, String> {
        self.0.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
