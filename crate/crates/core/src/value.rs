//! Exact rational numbers for bids, prices, values and utilities.
//!
//! Small fractions live in a checked `i64` representation and are promoted to
//! arbitrary precision only when an operation would overflow. The
//! representation is canonical, so structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

type Small = Ratio<i64>;

#[derive(Clone, Debug)]
enum Repr {
    Small(Small),
    Big(Box<BigRational>),
}

/// An exact rational number. Signed, so it also carries utilities.
#[derive(Clone, Debug)]
pub struct Value(Repr);

/// Failure to parse a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}: expected \"p/q\" or an integer")]
pub struct ParseValueError(pub String);

impl Value {
    /// Zero.
    pub fn zero() -> Self {
        Value(Repr::Small(Small::zero()))
    }

    /// One.
    pub fn one() -> Self {
        Value(Repr::Small(Small::one()))
    }

    /// The integer `n`.
    pub fn from_int(n: i64) -> Self {
        Value(Repr::Small(Small::from_integer(n)))
    }

    /// The fraction `numer/denom`. Panics when `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Value(Repr::Small(Small::new(numer, denom)))
    }

    /// Wraps an arbitrary-precision rational, demoting it when it fits.
    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => {
                Value(Repr::Small(Small::new_raw(n, d)))
            }
            _ => Value(Repr::Big(Box::new(r))),
        }
    }

    /// The value as an arbitrary-precision rational.
    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(s) => BigRational::new_raw(BigInt::from(*s.numer()), BigInt::from(*s.denom())),
            Repr::Big(b) => (**b).clone(),
        }
    }

    /// Nearest `f64`, for statistics and display only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(s) => *s.numer() as f64 / *s.denom() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Numerator and denominator in lowest terms (denominator positive).
    pub fn parts(&self) -> (BigInt, BigInt) {
        let b = self.to_big();
        (b.numer().clone(), b.denom().clone())
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn small_parts(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(s) => Some((*s.numer(), *s.denom())),
            Repr::Big(_) => None,
        }
    }

    /// The integer `n` as a value, for counts.
    pub fn from_usize(n: usize) -> Self {
        Value::from_int(i64::try_from(n).expect("count fits in i64"))
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_zero(),
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_positive(),
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    /// `1/self`, or `None` for zero.
    pub fn recip(&self) -> Option<Value> {
        if self.is_zero() {
            return None;
        }
        Some(Value::one() / self)
    }

    /// The larger of two values (the first on ties).
    pub fn max_of(self, other: Value) -> Value {
        if other > self {
            other
        } else {
            self
        }
    }

    /// The smaller of two values (the first on ties).
    pub fn min_of(self, other: Value) -> Value {
        if other < self {
            other
        } else {
            self
        }
    }

    /// The harmonic number `H_n = 1 + 1/2 + ... + 1/n`.
    pub fn harmonic(n: usize) -> Value {
        (1..=n).map(|k| Value::one() / Value::from_usize(k)).sum()
    }

    fn big_op(a: &Value, b: &Value, op: impl Fn(BigRational, BigRational) -> BigRational) -> Value {
        Value::from_big(op(a.to_big(), b.to_big()))
    }
}

impl Default for Value {
    fn default() -> Self {
        Value::zero()
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(s) => {
                0u8.hash(state);
                s.numer().hash(state);
                s.denom().hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $big:expr) => {
        impl<'a> $tr<&'a Value> for &'a Value {
            type Output = Value;
            fn $method(self, rhs: &'a Value) -> Value {
                if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
                    if let Some(r) = a.$checked(b) {
                        if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                            return Value(Repr::Small(r));
                        }
                    }
                }
                Value::big_op(self, rhs, $big)
            }
        }
        impl $tr<Value> for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Value> for Value {
            type Output = Value;
            fn $method(self, rhs: &'a Value) -> Value {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Value> for &'a Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add, |a, b| a + b);
binop!(Sub, sub, checked_sub, |a, b| a - b);
binop!(Mul, mul, checked_mul, |a, b| a * b);
binop!(Div, div, checked_div_nonzero, |a, b| a / b);

trait CheckedDivNonzero: Sized {
    fn checked_div_nonzero(&self, rhs: &Self) -> Option<Self>;
}

impl CheckedDivNonzero for Small {
    fn checked_div_nonzero(&self, rhs: &Self) -> Option<Self> {
        assert!(!rhs.is_zero(), "division by zero");
        self.checked_div(rhs)
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value::zero() - self
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value::zero() - self
    }
}

impl AddAssign<&Value> for Value {
    fn add_assign(&mut self, rhs: &Value) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Value> for Value {
    fn add_assign(&mut self, rhs: Value) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Value> for Value {
    fn sub_assign(&mut self, rhs: &Value) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Value> for Value {
    fn sub_assign(&mut self, rhs: Value) {
        *self = &*self - &rhs;
    }
}

impl Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Value> for Value {
    fn sum<I: Iterator<Item = &'a Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::from_int(n)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(s) if *s.denom() == 1 => write!(f, "{}", s.numer()),
            Repr::Small(s) => write!(f, "{}/{}", s.numer(), s.denom()),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseValueError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Value::from_big(BigRational::new(n, d)))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
        Ok(Value::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
        Ok(Value::from_big(BigRational::from_integer(BigInt::from(v))))
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ValueVisitor)
    }
}

/// Shorthand for `Value::new`.
pub fn q(numer: i64, denom: i64) -> Value {
    Value::new(numer, denom)
}
