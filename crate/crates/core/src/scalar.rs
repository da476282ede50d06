//! Exact rational scalars.
//!
//! All coefficients in the engine are arbitrary-precision rationals. `BigRational`
//! already maintains the invariants we need (lowest terms, nonzero denominator,
//! sign carried by the numerator), so we use it directly and keep a few
//! constructors here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Scalar = BigRational;

/// Integer scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational scalar `n/d`. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Scalar {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(frac(2, 4), frac(1, 2));
        assert_eq!(frac(1, -2), frac(-1, 2));
        assert!(frac(-3, -3).is_one());
        assert_eq!(frac(0, 5), zero());
    }

    #[test]
    fn exact_arithmetic() {
        let a = frac(1, 3);
        let b = frac(1, 6);
        assert_eq!(&a + &b, frac(1, 2));
        assert_eq!(&a * &b, frac(1, 18));
        assert_eq!(&a - &a, zero());
    }
}
