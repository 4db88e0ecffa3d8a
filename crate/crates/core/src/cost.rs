//! Exact cost arithmetic.
//!
//! All costs, PCS components and preference values are exact rationals so
//! that Pareto dominance checks never suffer from rounding.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational quantity in cost units.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(Rational64);

impl Cost {
    pub const ZERO: Cost = Cost(Rational64::new_raw(0, 1));
    pub const ONE: Cost = Cost(Rational64::new_raw(1, 1));

    pub const fn integer(n: i64) -> Self {
        Cost(Rational64::new_raw(n, 1))
    }

    /// `numer / denom`; panics when `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Cost(Rational64::new(numer, denom))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// `max(self, 0)`.
    pub fn positive_part(self) -> Self {
        if self.0.is_negative() {
            Cost::ZERO
        } else {
            self
        }
    }

    /// Lossy conversion, only for reporting and plotting.
    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl From<i64> for Cost {
    fn from(n: i64) -> Self {
        Cost::integer(n)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Mul for Cost {
    type Output = Cost;
    fn mul(self, rhs: Cost) -> Cost {
        Cost(self.0 * rhs.0)
    }
}

impl Neg for Cost {
    type Output = Cost;
    fn neg(self) -> Cost {
        Cost(-self.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |acc, c| acc + c)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |acc, c| acc + *c)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}` (expected an integer, a decimal like 1.25 or a fraction like 3/4)")]
pub struct ParseCostError(pub String);

impl FromStr for Cost {
    type Err = ParseCostError;

    /// Accepts `7`, `-2`, `1.25`, `3/4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCostError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Cost::ratio(n, d));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        if body.is_empty() {
            return Err(err());
        }
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (int_part.is_empty() && frac_part.is_empty())
            || frac_part.len() > 18
        {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i64 = digits.parse().map_err(|_| err())?;
        let denom = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(err)?;
        let value = Cost::ratio(numer, denom);
        Ok(if neg { -value } else { value })
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(*self.0.numer())
        } else {
            serializer.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CostVisitor;

        impl de::Visitor<'_> for CostVisitor {
            type Value = Cost;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a rational string such as \"3/4\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
                Ok(Cost::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
                i64::try_from(v)
                    .map(Cost::integer)
                    .map_err(|_| E::custom("cost out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cost, E> {
                if !v.is_finite() {
                    return Err(E::custom("cost must be finite"));
                }
                // Shortest round-trip decimal, e.g. 0.1 -> "0.1" -> 1/10.
                format!("{v}").parse().map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(CostVisitor)
    }
}

/// An upper bound that may be infinite, e.g. the preference budget `mu_max`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Bound {
    Finite(Cost),
    #[default]
    Infinite,
}

impl Bound {
    pub fn admits(&self, value: Cost) -> bool {
        match self {
            Bound::Finite(b) => value <= *b,
            Bound::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<Cost> {
        match self {
            Bound::Finite(c) => Some(*c),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(c) => write!(f, "{c}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = ParseCostError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" | "∞" => Ok(Bound::Infinite),
            other => other.parse().map(Bound::Finite),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(c) => c.serialize(serializer),
            Bound::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Value(Cost),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
            Raw::Value(c) => Ok(Bound::Finite(c)),
        }
    }
}
