use nalgebra::{Complex, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized two-qubit ket in the `(HH, HV, VH, VV)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amps: Vector4<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amps: Vector4<Complex<T>>) -> Result<Self> {
        let norm_sq = amps.norm_squared();
        if (norm_sq - T::one()).abs() > T::validation_tol() {
            return Err(Error::Validation(format!(
                "state vector squared norm is {norm_sq:?}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amps: Vector4<Complex<T>>) -> Result<Self> {
        let norm = amps.norm();
        if norm <= T::zero() {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    /// `(|HH> + |VV>)/sqrt 2`.
    pub fn bell_phi_plus() -> Self {
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self {
            amps: Vector4::new(h, z, z, h),
        }
    }

    /// Computational basis ket `index` (0 = HH ... 3 = VV).
    pub fn basis(index: usize) -> Self {
        assert!(index < 4, "basis index {index} out of range");
        let mut amps = Vector4::zeros();
        amps[index] = Complex::new(T::one(), T::zero());
        Self { amps }
    }

    /// Tensor product of two single-qubit kets, arm A first.
    pub fn product(a: &Vector2<Complex<T>>, c: &Vector2<Complex<T>>) -> Result<Self> {
        let amps = Vector4::new(a[0] * c[0], a[0] * c[1], a[1] * c[0], a[1] * c[1]);
        Self::normalized(amps)
    }

    pub fn amplitudes(&self) -> &Vector4<Complex<T>> {
        &self.amps
    }

    /// Probability of computational basis outcome `index`.
    pub fn probability(&self, index: usize) -> T {
        self.amps[index].norm_sqr()
    }
}

impl<T: Real> Default for StateVector<T> {
    fn default() -> Self {
        Self::bell_phi_plus()
    }
}
