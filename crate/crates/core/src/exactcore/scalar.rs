use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::field::{Field, Rational};

/// A Gaussian rational `re + im·i`.
///
/// `BigRational` keeps both parts in lowest terms with positive
/// denominators.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    pub re: Rational,
    pub im: Rational,
}

impl ExactScalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExactScalar { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ExactScalar { re, im: <Rational as Zero>::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(v)))
    }

    pub fn i() -> Self {
        ExactScalar { re: <Rational as Zero>::zero(), im: Rational::from_integer(BigInt::from(1)) }
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `re² + im²`, zero only for the zero scalar.
    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    /// Floating approximation, for reporting only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

impl Field for ExactScalar {
    fn zero() -> Self {
        ExactScalar::default()
    }
    fn one() -> Self {
        ExactScalar::from_int(1)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn plus(&self, o: &Self) -> Self {
        ExactScalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn minus(&self, o: &Self) -> Self {
        ExactScalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn times(&self, o: &Self) -> Self {
        if Zero::is_zero(&self.im) && Zero::is_zero(&o.im) {
            return ExactScalar::real(&self.re * &o.re);
        }
        ExactScalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn negated(&self) -> Self {
        ExactScalar { re: -&self.re, im: -&self.im }
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(ExactScalar { re: &self.re / &n, im: -&self.im / &n })
    }
    fn conj(&self) -> Self {
        ExactScalar { re: self.re.clone(), im: -&self.im }
    }
    fn from_rational(q: Rational) -> Self {
        ExactScalar::real(q)
    }
    fn bits(&self) -> u64 {
        self.re.bits() + self.im.bits()
    }

    fn as_real(&self) -> Option<Rational> {
        if Zero::is_zero(&self.im) {
            Some(self.re.clone())
        } else {
            None
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                Field::$f(&self, &o)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &ExactScalar) -> ExactScalar {
                Field::$f(self, o)
            }
        }
    };
}

forward_binop!(Add, add, plus);
forward_binop!(Sub, sub, minus);
forward_binop!(Mul, mul, times);

impl Div for ExactScalar {
    type Output = ExactScalar;
    /// Panics on division by zero, like integer division.
    fn div(self, o: ExactScalar) -> ExactScalar {
        self.times(&o.inverse().expect("division by zero"))
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.negated()
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        ExactScalar::from_int(v)
    }
}

impl From<Rational> for ExactScalar {
    fn from(q: Rational) -> Self {
        ExactScalar::real(q)
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}/{}", q.numer(), q.denom())
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical text form: `p/q` for real values and `p/q+r/si` otherwise,
/// where a negative imaginary part is written `+-r/s`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.re, f)?;
        if !Zero::is_zero(&self.im) {
            f.write_str("+")?;
            fmt_rational(&self.im, f)?;
            f.write_str("i")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid scalar literal {literal:?}: {reason}")]
pub struct ScalarParseError {
    pub literal: String,
    pub reason: &'static str,
}

fn parse_rational(s: &str, whole: &str) -> Result<Rational, ScalarParseError> {
    let err = |reason| ScalarParseError { literal: whole.to_string(), reason };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let digits_ok = |t: &str, allow_sign: bool| {
        let t = if allow_sign { t.strip_prefix('-').unwrap_or(t) } else { t };
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits_ok(num, true) {
        return Err(err("numerator must be an optionally signed integer"));
    }
    if !digits_ok(den, false) {
        return Err(err("denominator must be an unsigned integer"));
    }
    let n: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let d: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if Zero::is_zero(&d) {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Parses `[-]p/q` or `[-]p/q+[-]r/si`. Integers without a denominator
/// are accepted as a convenience; whitespace is rejected.
impl FromStr for ExactScalar {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ScalarParseError { literal: s.into(), reason: "empty literal" });
        }
        if s.chars().any(char::is_whitespace) {
            return Err(ScalarParseError { literal: s.into(), reason: "whitespace is not allowed" });
        }
        match s.strip_suffix('i') {
            None => Ok(ExactScalar::real(parse_rational(s, s)?)),
            Some(body) => {
                let plus = body.get(1..).and_then(|t| t.find('+')).map(|p| p + 1).ok_or(ScalarParseError {
                    literal: s.into(),
                    reason: "complex literal must have the form p/q+r/si",
                })?;
                let re = parse_rational(&body[..plus], s)?;
                let im = parse_rational(&body[plus + 1..], s)?;
                Ok(ExactScalar { re, im })
            }
        }
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = ExactScalar;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a scalar string such as \"1/2\" or \"1/2+-3/4i\", or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExactScalar, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExactScalar, E> {
                Ok(ExactScalar::from_int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExactScalar, E> {
                i64::try_from(v).map(ExactScalar::from_int).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Parses a rational literal `[-]p/q` (or an integer).
pub fn parse_rational_literal(s: &str) -> Result<Rational, ScalarParseError> {
    parse_rational(s, s)
}

/// `true` iff the scalar is a real, strictly positive rational.
pub fn is_positive_real(x: &ExactScalar) -> bool {
    Zero::is_zero(&x.im) && x.re.is_positive()
}
