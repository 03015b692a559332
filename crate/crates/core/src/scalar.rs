//! Scalar abstraction shared by the numerical modules.
//!
//! Everything that is plain arithmetic on states, conversion amplitudes and
//! timing distributions is written against [`Real`], so the same code runs in
//! `f32` and `f64`. Stochastic simulation and file I/O work in `f64` only.

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the numerical core (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FloatConst + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Tolerance used when validating physical invariants (Hermiticity,
    /// unit trace, positivity).
    fn validation_tol() -> Self;

    /// Smallest probability the likelihood code will divide by.
    fn probability_floor() -> Self;

    fn erf(self) -> Self;
}

impl Real for f64 {
    fn validation_tol() -> Self {
        1e-9
    }

    fn probability_floor() -> Self {
        1e-12
    }

    fn erf(self) -> Self {
        libm::erf(self)
    }
}

impl Real for f32 {
    fn validation_tol() -> Self {
        1e-4
    }

    fn probability_floor() -> Self {
        1e-12
    }

    fn erf(self) -> Self {
        libm::erff(self)
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts `T` to `f64`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar representable as f64")
}

/// FWHM of a Gaussian divided by its standard deviation, `2 sqrt(2 ln 2)`.
pub fn fwhm_per_sigma<T: Real>() -> T {
    lit::<T>(2.0) * (lit::<T>(2.0) * T::LN_2()).sqrt()
}
