//! Truncated power series in `y` and Fourier–Taylor series in `(x, y)`.
//!
//! Every object carries its truncation order; all arithmetic is exact up to
//! that order (and up to the harmonic cap for Fourier–Taylor series).

mod fourier;
mod poly;

use core::fmt::Debug;
use core::ops::Neg;

use num_rational::Ratio;
use num_traits::Num;

pub use fourier::FourierTaylorSeries;
pub use poly::UnivariatePoly;

/// Exact rational coefficients, used where all inputs are x-independent.
pub type Rational = Ratio<i128>;

/// Coefficient field of a [`UnivariatePoly`].
pub trait Coeff: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Absolute value as a float, for tolerance checks.
    fn magnitude(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Coeff for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn magnitude(&self) -> f64 {
        num_traits::Float::abs(*self)
    }
}

impl Coeff for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn magnitude(&self) -> f64 {
        let v = *self.numer() as f64 / *self.denom() as f64;
        num_traits::Float::abs(v)
    }
}
