use nalgebra::{Complex, Matrix4};

use super::density::{hermitian_eigen, DensityOperator};
use super::pauli::pauli;
use super::state::StateVector;
use crate::scalar::{lit, Real};

/// `<psi|rho|psi>`; the imaginary residue of the quadratic form is dropped.
pub fn fidelity_to_pure<T: Real>(rho: &DensityOperator<T>, psi: &StateVector<T>) -> T {
    let a = psi.amplitudes();
    let f = (a.adjoint() * rho.matrix() * a)[(0, 0)].re;
    f.max(T::zero()).min(T::one())
}

/// `tr(rho^2)`.
pub fn purity<T: Real>(rho: &DensityOperator<T>) -> T {
    let m = rho.matrix();
    (m * m).trace().re
}

/// Wootters concurrence.
///
/// The decreasing roots `l_i` of the eigenvalues of `rho (sy sy) rho* (sy sy)`
/// are computed as the roots of the eigenvalues of the Hermitian matrix
/// `sqrt(rho) (sy sy) rho* (sy sy) sqrt(rho)`, which has the same spectrum.
pub fn concurrence<T: Real>(rho: &DensityOperator<T>) -> T {
    let sy = pauli::<T>(2);
    let yy: Matrix4<Complex<T>> = sy.kronecker(&sy);
    let m = rho.matrix();
    let flipped = yy * m.map(|z| z.conj()) * yy;
    let root = rho.sqrt();
    let (mu, _) = hermitian_eigen(&(root * flipped * root));
    let l = mu.map(|v| v.max(T::zero()).sqrt());
    (l[0] - l[1] - l[2] - l[3]).max(T::zero()).min(T::one())
}

/// Base-2 binary entropy, `h(0) = h(1) = 0`.
pub fn binary_entropy<T: Real>(x: T) -> T {
    let term = |p: T| {
        if p <= T::zero() {
            T::zero()
        } else {
            -p * p.log2()
        }
    };
    term(x) + term(T::one() - x)
}

pub fn eof_from_concurrence<T: Real>(c: T) -> T {
    let c = c.max(T::zero()).min(T::one());
    let x = (T::one() + (T::one() - c * c).max(T::zero()).sqrt()) * lit(0.5);
    binary_entropy(x)
}

/// Entanglement of formation.
pub fn eof<T: Real>(rho: &DensityOperator<T>) -> T {
    eof_from_concurrence(concurrence(rho))
}
