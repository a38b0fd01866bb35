//! Tri-state condition evaluation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{CmpOp, Condition, Literal, ParamType};

/// A bound parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Value {
    Bool(bool),
    Text(String),
    Number(f64),
    Category(String),
}

impl Value {
    pub fn ptype(&self) -> ParamType {
        match self {
            Value::Bool(_) => ParamType::Boolean,
            Value::Text(_) => ParamType::Text,
            Value::Number(_) => ParamType::Number,
            Value::Category(_) => ParamType::Category,
        }
    }
}

impl From<&Literal> for Value {
    fn from(l: &Literal) -> Self {
        match l {
            Literal::Text(s) => Value::Text(s.clone()),
            Literal::Number(n) => Value::Number(*n),
            Literal::Ident(s) => Value::Category(s.clone()),
            Literal::Bool(b) => Value::Bool(*b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) | Value::Category(s) => f.write_str(s),
            Value::Number(n) => write!(f, "{n}"),
        }
    }
}

/// Parameter name to value. Iteration is in name order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings(BTreeMap<String, Value>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) {
        self.0.insert(name.into(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (S, Value)>>(iter: I) -> Self {
        Bindings(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriState {
    KnownTrue,
    KnownFalse,
    /// The leftmost parameter evaluation needs and has no binding for.
    Unknown(String),
}

impl TriState {
    fn from_bool(b: bool) -> Self {
        if b {
            TriState::KnownTrue
        } else {
            TriState::KnownFalse
        }
    }

    pub fn known(&self) -> Option<bool> {
        match self {
            TriState::KnownTrue => Some(true),
            TriState::KnownFalse => Some(false),
            TriState::Unknown(_) => None,
        }
    }
}

/// Evaluates `cond` left to right with short-circuiting.
///
/// `and` stops at the first operand that is false or unknown, `or` at the
/// first that is true or unknown, so an unknown result always names the
/// parameter that has to be asked next. Ill-typed comparisons, which lint
/// rules out, evaluate to false.
pub fn evaluate_condition(cond: &Condition, bindings: &Bindings) -> TriState {
    match cond {
        Condition::True => TriState::KnownTrue,
        Condition::False => TriState::KnownFalse,
        Condition::Param(name) => match bindings.get(&name.value) {
            None => TriState::Unknown(name.value.clone()),
            Some(Value::Bool(b)) => TriState::from_bool(*b),
            Some(_) => TriState::KnownFalse,
        },
        Condition::Compare { param, op, literal } => match bindings.get(&param.value) {
            None => TriState::Unknown(param.value.clone()),
            Some(v) => TriState::from_bool(compare(v, *op, &literal.value)),
        },
        Condition::Not(inner) => match evaluate_condition(inner, bindings) {
            TriState::KnownTrue => TriState::KnownFalse,
            TriState::KnownFalse => TriState::KnownTrue,
            unknown => unknown,
        },
        Condition::And(l, r) => match evaluate_condition(l, bindings) {
            TriState::KnownTrue => evaluate_condition(r, bindings),
            other => other,
        },
        Condition::Or(l, r) => match evaluate_condition(l, bindings) {
            TriState::KnownFalse => evaluate_condition(r, bindings),
            other => other,
        },
    }
}

pub fn compare(value: &Value, op: CmpOp, literal: &Literal) -> bool {
    use std::cmp::Ordering;

    let ordering = match (value, literal) {
        (Value::Number(a), Literal::Number(b)) => a.partial_cmp(b),
        (Value::Bool(a), Literal::Bool(b)) => return equality(op, a == b),
        (Value::Text(a), Literal::Text(b)) | (Value::Category(a), Literal::Ident(b)) => {
            return equality(op, a == b);
        }
        _ => return false,
    };
    let Some(ordering) = ordering else { return false };
    match op {
        CmpOp::Eq => ordering == Ordering::Equal,
        CmpOp::Ne => ordering != Ordering::Equal,
        CmpOp::Lt => ordering == Ordering::Less,
        CmpOp::Le => ordering != Ordering::Greater,
        CmpOp::Gt => ordering == Ordering::Greater,
        CmpOp::Ge => ordering != Ordering::Less,
    }
}

fn equality(op: CmpOp, equal: bool) -> bool {
    match op {
        CmpOp::Eq => equal,
        CmpOp::Ne => !equal,
        _ => false,
    }
}
