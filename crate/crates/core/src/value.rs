//! Exact value tokens and finite sets of them.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A discrete atom taken by an uncertain variable.
///
/// Rationals with unit denominator are always stored as [`Value::Int`], so
/// `Int(2)` and `2/1` are the same value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Rat(BigRational),
    Sym(String),
    Tuple(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValueError {
    #[error("zero denominator in rational `{0}`")]
    ZeroDenominator(String),
    #[error("non-integer JSON number {0}; write exact rationals as \"p/q\"")]
    InexactNumber(String),
    #[error("unsupported JSON value {0}")]
    Unsupported(String),
}

impl Value {
    pub fn sym(s: impl Into<String>) -> Self {
        Value::Sym(s.into())
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Self {
        Value::Tuple(items.into_iter().collect())
    }

    pub fn pair(a: Value, b: Value) -> Self {
        Value::Tuple(vec![a, b])
    }

    /// Builds the canonical value of an exact rational.
    pub fn from_rational(r: BigRational) -> Self {
        if r.denom().is_one() {
            if let Some(i) = r.numer().to_i64() {
                return Value::Int(i);
            }
        }
        Value::Rat(r)
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Value::from_rational(BigRational::new(numer.into(), denom.into()))
    }

    /// Numeric view, if the value is an integer or a rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer((*i).into())),
            Value::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(items) => Some(items),
            _ => None,
        }
    }

    /// Parses a bare token: integer, `p/q`, decimal, otherwise a symbol.
    pub fn parse_token(s: &str) -> Result<Self, ValueError> {
        match parse_rational(s) {
            Some(Ok(r)) => Ok(Value::from_rational(r)),
            Some(Err(e)) => Err(e),
            None => Ok(Value::Sym(s.to_string())),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ValueError> {
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Value::Int)
                .ok_or_else(|| ValueError::InexactNumber(n.to_string())),
            serde_json::Value::String(s) => Value::parse_token(s),
            serde_json::Value::Array(items) => items
                .iter()
                .map(Value::from_json)
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Tuple),
            other => Err(ValueError::Unsupported(other.to_string())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Rat(r) => serde_json::Value::String(format_rational(r)),
            Value::Sym(s) => serde_json::Value::String(s.clone()),
            Value::Tuple(items) => serde_json::Value::Array(items.iter().map(Value::to_json).collect()),
        }
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.to_string())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(r) => f.write_str(&format_rational(r)),
            Value::Sym(s) => f.write_str(s),
            Value::Tuple(items) => {
                f.write_str("(")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(deserializer)?;
        Value::from_json(&raw).map_err(D::Error::custom)
    }
}

pub(crate) fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Returns `None` when `s` does not look numeric at all.
pub(crate) fn parse_rational(s: &str) -> Option<Result<BigRational, ValueError>> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return Some(Err(ValueError::ZeroDenominator(s.to_string())));
        }
        return Some(Ok(BigRational::new(p, q)));
    }
    if let Ok(i) = BigInt::from_str(t) {
        return Some(Ok(BigRational::from_integer(i)));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.')?;
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer = BigInt::from_str(&digits).ok()?;
    let denom = num::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(numer, denom);
    Some(Ok(if neg { -r } else { r }))
}

/// A finite set of values, ordered.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueSet(BTreeSet<Value>);

impl ValueSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: Value) -> bool {
        self.0.insert(v)
    }

    pub fn intersects(&self, other: &ValueSet) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|v| large.contains(v))
    }

    pub fn intersection(&self, other: &ValueSet) -> ValueSet {
        self.0.intersection(&other.0).cloned().collect()
    }

    pub fn union(&self, other: &ValueSet) -> ValueSet {
        self.0.union(&other.0).cloned().collect()
    }

    pub fn is_subset(&self, other: &ValueSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn into_inner(self) -> BTreeSet<Value> {
        self.0
    }

    /// Cartesian product of the given sets, as tuples.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a ValueSet>) -> ValueSet {
        let mut acc: Vec<Vec<Value>> = vec![Vec::new()];
        for factor in factors {
            let mut next = Vec::with_capacity(acc.len() * factor.len());
            for prefix in &acc {
                for v in factor.iter() {
                    let mut row = prefix.clone();
                    row.push(v.clone());
                    next.push(row);
                }
            }
            acc = next;
        }
        acc.into_iter().map(Value::Tuple).collect()
    }
}

impl Deref for ValueSet {
    type Target = BTreeSet<Value>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl FromIterator<Value> for ValueSet {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        ValueSet(iter.into_iter().collect())
    }
}

impl IntoIterator for ValueSet {
    type Item = Value;
    type IntoIter = std::collections::btree_set::IntoIter<Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a ValueSet {
    type Item = &'a Value;
    type IntoIter = std::collections::btree_set::Iter<'a, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Shorthand for a set of integers.
pub fn int_set(items: impl IntoIterator<Item = i64>) -> ValueSet {
    items.into_iter().map(Value::Int).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_normalize() {
        assert_eq!(Value::ratio(4, 2), Value::Int(2));
        assert_eq!(Value::ratio(2, 4), Value::parse_token("1/2").unwrap());
        assert_eq!(Value::parse_token("0.25").unwrap(), Value::ratio(1, 4));
        assert_eq!(Value::parse_token("-1.5").unwrap(), Value::ratio(-3, 2));
        assert_eq!(Value::parse_token("e").unwrap(), Value::sym("e"));
        assert!(matches!(Value::parse_token("1/0"), Err(ValueError::ZeroDenominator(_))));
    }

    #[test]
    fn json_numbers_must_be_exact() {
        let v: serde_json::Value = serde_json::from_str("0.5").unwrap();
        assert!(matches!(Value::from_json(&v), Err(ValueError::InexactNumber(_))));
        let v: serde_json::Value = serde_json::from_str(r#"[1, "2/3", "a"]"#).unwrap();
        let parsed = Value::from_json(&v).unwrap();
        assert_eq!(parsed, Value::tuple([Value::Int(1), Value::ratio(2, 3), Value::sym("a")]));
        assert_eq!(parsed.to_json(), v);
    }

    #[test]
    fn tuples_compare_componentwise() {
        let a = Value::pair(0.into(), 1.into());
        let b = Value::pair(0.into(), 2.into());
        let c = Value::pair(1.into(), 0.into());
        assert!(a < b && b < c);
        assert_eq!(a.to_string(), "(0,1)");
    }

    #[test]
    fn product_of_sets() {
        let s = int_set([0, 1]);
        let p = ValueSet::product([&s, &s]);
        assert_eq!(p.len(), 4);
        assert!(p.contains(&Value::pair(1.into(), 0.into())));
    }
}
