//! Scalar values carried by invocations, responses and object cells.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A tagged scalar.
///
/// `Null`, `Empty` and `Unit` are reserved: `Null` marks an unused array cell
/// or node field, `Empty` is what a dequeue reports on an empty structure and
/// `Unit` is the response of a method that returns nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Int(i64),
    Sym(Arc<str>),
    Null,
    Empty,
    Unit,
}

impl Value {
    pub fn sym(s: &str) -> Value {
        Value::Sym(Arc::from(s))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Rendering used inside object-state dumps: symbols without quotes and
    /// `Null` as a centred dot.
    pub fn cell(&self) -> String {
        match self {
            Value::Int(n) => n.to_string(),
            Value::Sym(s) => s.to_string(),
            Value::Null => "·".to_string(),
            Value::Empty => "EMPTY".to_string(),
            Value::Unit => "unit".to_string(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => write!(f, "'{s}'"),
            Value::Null => f.write_str("null"),
            Value::Empty => f.write_str("EMPTY"),
            Value::Unit => f.write_str("unit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a value: `{0}`")]
pub struct ParseValueError(pub String);

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "null" => return Ok(Value::Null),
            "EMPTY" => return Ok(Value::Empty),
            "unit" => return Ok(Value::Unit),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix('\'').and_then(|r| r.strip_suffix('\'')) {
            let printable = !inner.is_empty()
                && inner
                    .chars()
                    .all(|c| !c.is_whitespace() && c != '\'' && !c.is_control());
            if printable {
                return Ok(Value::sym(inner));
            }
            return Err(ParseValueError(s.to_string()));
        }
        s.parse::<i64>()
            .map(Value::Int)
            .map_err(|_| ParseValueError(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_values_are_distinct() {
        let reserved = [Value::Null, Value::Empty, Value::Unit];
        for (i, a) in reserved.iter().enumerate() {
            for (j, b) in reserved.iter().enumerate() {
                assert_eq!(i == j, a == b);
            }
            assert_ne!(a, &Value::Int(0));
            assert_ne!(a, &Value::sym("null"));
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        for text in ["0", "-12", "'c'", "'xy'", "null", "EMPTY", "unit"] {
            let v: Value = text.parse().unwrap();
            assert_eq!(v.to_string(), text);
        }
        assert!("''".parse::<Value>().is_err());
        assert!("c".parse::<Value>().is_err());
        assert!("'a b'".parse::<Value>().is_err());
    }
}
