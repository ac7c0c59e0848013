//! JSON helpers for arbitrary-precision integers: emitted as numbers when
//! they fit in 64 bits, otherwise as decimal strings; both forms are accepted.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub fn to_value(x: &BigInt) -> Value {
    if let Some(v) = x.to_i64() {
        Value::from(v)
    } else if let Some(v) = x.to_u64() {
        Value::from(v)
    } else {
        Value::String(x.to_string())
    }
}

pub fn from_value(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(format!("expected an integer, got {n}"))
            }
        }
        Value::String(s) => s.trim().parse::<BigInt>().map_err(|e| format!("bad integer `{s}`: {e}")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(to_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let values = Vec::<Value>::deserialize(d)?;
        values.iter().map(|v| from_value(v).map_err(D::Error::custom)).collect()
    }
}
