use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always stored in lowest terms with a
/// positive denominator.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(Rational);

/// Builds `numer / denom` in reduced form.
pub fn rat(numer: i64, denom: i64) -> Result<ExactRational> {
    ExactRational::new(numer, denom)
}

impl ExactRational {
    pub fn new(numer: impl Into<Integer>, denom: impl Into<Integer>) -> Result<Self> {
        let denom = denom.into();
        if denom == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(Rational::from((numer.into(), denom))))
    }

    pub fn zero() -> Self {
        Self(Rational::new())
    }

    pub fn one() -> Self {
        Self(Rational::from(1))
    }

    pub fn from_int(v: impl Into<Integer>) -> Self {
        Self(Rational::from(v.into()))
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i64) -> Self {
        let mag = Integer::from(1) << exp.unsigned_abs() as u32;
        if exp >= 0 {
            Self(Rational::from(mag))
        } else {
            Self(Rational::from((Integer::from(1), mag)))
        }
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Ordering::Less
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(self.0.clone().recip()))
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> Integer {
        self.0.clone().floor().into_numer_denom().0
    }

    /// Multiplies by `2^exp` without a general multiplication.
    pub fn mul_pow2(&self, exp: i64) -> Self {
        let mut r = self.0.clone();
        if exp >= 0 {
            r <<= exp as u32;
        } else {
            r >>= exp.unsigned_abs() as u32;
        }
        Self(r)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn inner(&self) -> &Rational {
        &self.0
    }

    /// Decimal rendering with `places` digits after the point (truncated
    /// toward zero); used only for human-facing reports.
    pub fn to_decimal(&self, places: u32) -> String {
        let scale = Integer::from(Integer::u_pow_u(10, places));
        let scaled = Rational::from(&self.0 * &scale);
        let (n, d) = scaled.into_numer_denom();
        let q = n.div_rem(d).0;
        let neg = q < 0 || (q == 0 && self.is_negative());
        let digits = q.abs().to_string();
        let digits = format!("{:0>width$}", digits, width = places as usize + 1);
        let (int, frac) = digits.split_at(digits.len() - places as usize);
        let sign = if neg { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        Self::from_int(v)
    }
}

impl From<Integer> for ExactRational {
    fn from(v: Integer) -> Self {
        Self(Rational::from(v))
    }
}

impl From<Rational> for ExactRational {
    fn from(v: Rational) -> Self {
        Self(v)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<Integer>()
                .map_err(|e| Error::Parameter(format!("bad rational {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Self::new(parse(n)?, parse(d)?),
            None => Ok(Self::from_int(parse(s)?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(Rational::from((&self.0).$method(&rhs.0)))
            }
        }
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(mut self, rhs: ExactRational) -> ExactRational {
                self.0.$assign(rhs.0);
                self
            }
        }
        impl $tr<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(mut self, rhs: &ExactRational) -> ExactRational {
                self.0.$assign(&rhs.0);
                self
            }
        }
        impl $assign_tr<&ExactRational> for ExactRational {
            fn $assign(&mut self, rhs: &ExactRational) {
                self.0.$assign(&rhs.0);
            }
        }
        impl $assign_tr<ExactRational> for ExactRational {
            fn $assign(&mut self, rhs: ExactRational) {
                self.0.$assign(rhs.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

/// Panics on a zero divisor; use [`ExactRational::recip`] for a checked path.
impl Div<&ExactRational> for &ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &ExactRational) -> ExactRational {
        assert!(!rhs.is_zero(), "division by zero rational");
        ExactRational(Rational::from(&self.0 / &rhs.0))
    }
}

impl Div<ExactRational> for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        &self / &rhs
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}
