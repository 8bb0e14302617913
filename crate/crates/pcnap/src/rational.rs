//! Exact rational scalars shared across the library.
//!
//! All weights, penalties and LP data are `BigRational` by default. JSON
//! documents accept integers (JSON numbers) or `"p/q"` strings; floats are
//! rejected so no value is silently approximated. Canonical output emits a
//! JSON number when the value is an integer that fits in `i64`, otherwise a
//! `"p/q"` string.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::Add;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text form: `p` when the denominator is one, else `p/q`.
pub fn q_to_string(q: &Q) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_from_str(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad rational numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad rational denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::parse(format!("bad rational literal {s:?}")))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Canonical JSON form for a rational. Integers in `i64` range are emitted
/// as JSON numbers, everything else as a string.
pub fn q_to_json(q: &Q) -> serde_json::Value {
    if q.denom() == &BigInt::from(1) {
        if let Some(i) = q.numer().to_i64() {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::from(q_to_string(q))
}

pub fn q_from_json(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(q_int(i))
            } else {
                Err(Error::parse(format!(
                    "non-integer number {n} (write rationals as \"p/q\" strings)"
                )))
            }
        }
        serde_json::Value::String(s) => q_from_str(s),
        other => Err(Error::parse(format!("expected rational, got {other}"))),
    }
}

/// A rational extended with an absorbing infinity, used for penalties and
/// objective values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cost {
    Finite(Q),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(Q::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            Cost::Finite(q) => Some(q),
            Cost::Infinite => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Cost::Finite(q) => q_to_json(q),
            Cost::Infinite => serde_json::Value::from("inf"),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Cost> {
        if v.as_str() == Some("inf") {
            Ok(Cost::Infinite)
        } else {
            Ok(Cost::Finite(q_from_json(v)?))
        }
    }
}

impl Add<&Cost> for Cost {
    type Output = Cost;
    fn add(self, rhs: &Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<&Q> for Cost {
    type Output = Cost;
    fn add(self, rhs: &Q) -> Cost {
        match self {
            Cost::Finite(a) => Cost::Finite(a + rhs),
            Cost::Infinite => Cost::Infinite,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => std::cmp::Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => std::cmp::Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(q) => write!(f, "{}", q_to_string(q)),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

pub fn assert_nonnegative(q: &Q, what: &str) -> Result<()> {
    if q.is_negative() {
        Err(Error::validation(format!("{what} must be non-negative")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "5", "-3", "3/2", "7/3"] {
            let q = q_from_str(s).unwrap();
            assert_eq!(q_to_string(&q), s);
        }
        assert_eq!(q_to_string(&q_from_str("6/4").unwrap()), "3/2");
    }

    #[test]
    fn json_rejects_floats() {
        let v: serde_json::Value = serde_json::from_str("0.5").unwrap();
        assert!(q_from_json(&v).is_err());
    }

    #[test]
    fn cost_ordering_and_absorption() {
        let inf = Cost::Infinite;
        let one = Cost::Finite(q_int(1));
        assert!(one < inf);
        assert_eq!(one.clone() + &inf, Cost::Infinite);
        assert_eq!(one + &Cost::Finite(q_int(2)), Cost::Finite(q_int(3)));
    }
}
