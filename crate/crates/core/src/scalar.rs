//! Coefficient fields: exact Gaussian rationals for identities, `f64`
//! complexes for the witness search.

use core::fmt::Debug;
use core::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};

/// `a + bi` with arbitrary-precision rational parts.
pub type Exact = Complex<BigRational>;
pub type C64 = Complex<f64>;

/// A field with conjugation, enough for *-algebra arithmetic.
pub trait Scalar: Clone + PartialEq + Debug + Num + Neg<Output = Self> {
    fn conj(&self) -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

impl<T> Scalar for Complex<T>
where
    T: Clone + PartialEq + Debug + Num + Neg<Output = T> + FromPrimitive,
{
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_int(n: i64) -> Self {
        Complex::new(T::from_i64(n).expect("integer embeds"), T::zero())
    }
}

pub fn exact_int(n: i64) -> Exact {
    Exact::from_int(n)
}

pub fn exact_ratio(num: i64, den: i64) -> Exact {
    Complex::new(BigRational::new(BigInt::from(num), BigInt::from(den)), BigRational::from_integer(0.into()))
}

/// Nearest double of an exact scalar.
pub fn to_c64(x: &Exact) -> C64 {
    use num_traits::ToPrimitive;
    C64::new(x.re.to_f64().unwrap_or(f64::NAN), x.im.to_f64().unwrap_or(f64::NAN))
}

/// Squared modulus of an exact scalar, itself exact.
pub fn norm_sqr(x: &Exact) -> BigRational {
    &x.re * &x.re + &x.im * &x.im
}
