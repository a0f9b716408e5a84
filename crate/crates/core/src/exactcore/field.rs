use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact rational number with arbitrary precision.
pub type Rational = BigRational;

/// Arithmetic required by the dense linear algebra in this crate.
///
/// Methods take references so that big-number scalars are not cloned on
/// every operation. `conj` is the identity for real fields.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn from_rational(q: Rational) -> Self;
    /// The rational value if the scalar is real.
    fn as_real(&self) -> Option<Rational>;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(v)))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Bit size used to pick cheap pivots.
    fn bits(&self) -> u64 {
        0
    }

    /// `self -= a * b`, the elimination kernel.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self = self.minus(&a.times(b));
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn as_real(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

/// Shorthand for a rational from a numerator and a nonzero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `true` iff `q > 0`.
pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

/// The sign `ε(k) = (-1)^{k(k-1)/2}` used by the pairing conventions.
pub fn epsilon(k: i64) -> i64 {
    if k.rem_euclid(4) < 2 {
        1
    } else {
        -1
    }
}

/// `(-1)^k` for any integer `k`.
pub fn sign_pow(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_matches_closed_form() {
        for k in -9i64..=9 {
            let e = k * (k - 1) / 2;
            assert_eq!(epsilon(k), sign_pow(e), "k = {k}");
        }
    }

    #[test]
    fn rational_field_ops() {
        let a = rat(2, 3);
        let b = rat(-1, 6);
        assert_eq!(a.plus(&b), rat(1, 2));
        assert_eq!(a.times(&b), rat(-1, 9));
        assert_eq!(a.inverse(), Some(rat(3, 2)));
        assert_eq!(<Rational as Field>::zero().inverse(), None);
        let mut c = rat(1, 1);
        c.sub_mul_assign(&a, &b);
        assert_eq!(c, rat(10, 9));
    }
}
