use nalgebra::{Complex, Matrix2, Vector2, Vector3};

use crate::scalar::Real;

/// Pauli matrix `sigma_k` for `k = 0` (identity), 1 (x), 2 (y), 3 (z).
///
/// `|H>` is the +z eigenstate, `(|H> + |V>)/sqrt 2` the +x eigenstate and
/// `(|H> + i|V>)/sqrt 2` the +y eigenstate.
pub fn pauli<T: Real>(k: usize) -> Matrix2<Complex<T>> {
    let o = Complex::new(T::zero(), T::zero());
    let l = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    match k {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// Bloch vector `(<x>, <y>, <z>)` of a normalized single-qubit ket.
pub fn bloch_vector<T: Real>(psi: &Vector2<Complex<T>>) -> Vector3<T> {
    let expect = |k: usize| (psi.adjoint() * pauli::<T>(k) * psi)[(0, 0)].re;
    Vector3::new(expect(1), expect(2), expect(3))
}
