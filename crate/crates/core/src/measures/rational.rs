//! Exact rational arithmetic for measure weights and plan masses.
//!
//! Weights enter the library as `"p/q"` strings and never touch binary64:
//! every mass computation downstream (common denominators, atom masses,
//! marginal sums) is exact. The type is a thin wrapper around an
//! arbitrary-precision fraction that is always stored reduced with a
//! positive denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a rational (expected \"p\" or \"p/q\")")]
    Parse(String),
}

/// An exact fraction with arbitrary-precision numerator and denominator.
///
/// Invariants: the denominator is strictly positive and the fraction is
/// stored in lowest terms (the sign lives in the numerator).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`, reducing and normalizing the sign.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, RationalError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Denominator as an unsigned integer (it is positive by invariant).
    pub fn denom_unsigned(&self) -> BigUint {
        self.0
            .denom()
            .to_biguint()
            .expect("denominator is positive")
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Nearest binary64 value; loses exactness by design (display, costs).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn recip(&self) -> Result<Self, RationalError> {
        if self.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
        values
            .into_iter()
            .fold(Rational::zero(), |acc, v| &acc + v)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    /// Parses `"p"` or `"p/q"` with optional sign on either integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_int = |t: &str| BigInt::from_str(t).map_err(|_| RationalError::Parse(s.into()));
        match s.split_once('/') {
            None => Ok(Rational::from_integer(parse_int(s)?)),
            Some((num, den)) => {
                let denom = parse_int(den)?;
                if denom.is_zero() {
                    return Err(RationalError::ZeroDenominator);
                }
                Rational::new(parse_int(num)?, denom)
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({})", self)
    }
}

impl From<u64> for Rational {
    fn from(value: u64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }
}

impl From<BigUint> for Rational {
    fn from(value: BigUint) -> Self {
        Rational::from_integer(BigInt::from(value))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }

        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(D::Error::custom)
    }
}
