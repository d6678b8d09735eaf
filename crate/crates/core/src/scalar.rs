//! Scalar fields the symmetric-function and Pfaffian code is generic over.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type ExactScalar = BigRational;

/// A field element usable by the determinant, Pfaffian and Schur routines.
///
/// `EXACT` selects the elimination strategy: exact scalars take the first
/// nonzero pivot, floating scalars the largest in magnitude.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync {
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    /// Size used for pivot selection.
    fn magnitude(&self) -> f64;

    fn from_bigint(v: &BigInt) -> Self {
        Self::from_rational(&BigRational::from_integer(v.clone()))
    }

    fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Shorthand for an exact integer-valued rational.
pub fn rat(v: i64) -> BigRational {
    BigRational::from_i64(v)
}

/// Shorthand for the exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_by_squaring() {
        assert_eq!(Scalar::pow(&rat(3), 0), rat(1));
        assert_eq!(Scalar::pow(&rat(3), 5), rat(243));
        assert_eq!(Scalar::pow(&ratio(-1, 2), 3), ratio(-1, 8));
        let z = Complex64::new(0.0, 1.0);
        assert!((Scalar::pow(&z, 2) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rationals_stay_reduced() {
        let r = ratio(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }
}
