//! CHSH correlations: fixed-analyzer evaluation, the state-optimal value and
//! the estimate from raw coincidence counts.

use nalgebra::{Complex, Matrix3, Vector2, Vector3};

use super::density::DensityOperator;
use super::pauli::pauli;
use super::projector::{born_probabilities, WaveplateSetting};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Analyzer settings `(a, a')` on arm A and `(b, b')` on arm C.
///
/// `S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings<T: Real> {
    pub a: WaveplateSetting<T>,
    pub a_prime: WaveplateSetting<T>,
    pub b: WaveplateSetting<T>,
    pub b_prime: WaveplateSetting<T>,
}

impl<T: Real> ChshSettings<T> {
    /// Linear analyzers at 0 and pi/4 on arm A, pi/8 and 3pi/8 on arm C.
    pub fn standard() -> Self {
        let pi = T::PI();
        Self {
            a: WaveplateSetting::linear_analyzer(T::zero()),
            a_prime: WaveplateSetting::linear_analyzer(pi * lit(0.25)),
            b: WaveplateSetting::linear_analyzer(pi * lit(0.125)),
            b_prime: WaveplateSetting::linear_analyzer(pi * lit(0.375)),
        }
    }

    /// Settings attaining [`chsh_optimal`] for `rho`.
    ///
    /// With `c1, c2` the leading eigenvectors of `T^T T` (eigenvalues
    /// `m1 >= m2`) and `tan t = sqrt(m2/m1)`: `b = cos t c1 + sin t c2`,
    /// `b' = sin t c2 - cos t c1`, `a ~ T c1`, `a' ~ T c2`.
    pub fn optimal_for(rho: &DensityOperator<T>) -> Self {
        let t = correlation_matrix(rho);
        let (m, vecs) = sorted_gram_eigen(&t);
        let c1: Vector3<T> = vecs.column(0).into();
        let c2: Vector3<T> = vecs.column(1).into();
        let angle = m[1].max(T::zero()).sqrt().atan2(m[0].max(T::zero()).sqrt());
        let (s, c) = angle.sin_cos();
        let b = c1 * c + c2 * s;
        let b_prime = c2 * s - c1 * c;
        let a = unit_or(t * c1, c1);
        let a_prime = unit_or(t * c2, c2);
        Self {
            a: setting_for_bloch(&a),
            a_prime: setting_for_bloch(&a_prime),
            b: setting_for_bloch(&b),
            b_prime: setting_for_bloch(&b_prime),
        }
    }

    /// Setting pairs in the order `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(WaveplateSetting<T>, WaveplateSetting<T>); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

fn unit_or<T: Real>(v: Vector3<T>, fallback: Vector3<T>) -> Vector3<T> {
    let n = v.norm();
    if n > T::validation_tol() {
        v / n
    } else {
        let f = fallback.norm();
        if f > T::validation_tol() {
            fallback / f
        } else {
            Vector3::z()
        }
    }
}

fn setting_for_bloch<T: Real>(n: &Vector3<T>) -> WaveplateSetting<T> {
    let half = lit::<T>(0.5);
    let theta = n.z.max(-T::one()).min(T::one()).acos();
    let phi = n.y.atan2(n.x);
    let (s, c) = (theta * half).sin_cos();
    let ket = Vector2::new(
        Complex::new(c, T::zero()),
        Complex::new(s * phi.cos(), s * phi.sin()),
    );
    WaveplateSetting::for_state(&ket)
}

/// `T_ij = tr(rho sigma_i (x) sigma_j)` for `i, j` in `(x, y, z)`.
pub fn correlation_matrix<T: Real>(rho: &DensityOperator<T>) -> Matrix3<T> {
    Matrix3::from_fn(|i, j| {
        let op = pauli::<T>(i + 1).kronecker(&pauli::<T>(j + 1));
        rho.expectation(&op).re
    })
}

fn sorted_gram_eigen<T: Real>(t: &Matrix3<T>) -> (Vector3<T>, Matrix3<T>) {
    let eig = (t.transpose() * t).symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    (
        Vector3::from_fn(|i, _| eig.eigenvalues[order[i]]),
        Matrix3::from_fn(|r, c| eig.eigenvectors[(r, order[c])]),
    )
}

/// Maximal CHSH value over all analyzer settings, `2 sqrt(m1 + m2)`.
pub fn chsh_optimal<T: Real>(rho: &DensityOperator<T>) -> T {
    let (m, _) = sorted_gram_eigen(&correlation_matrix(rho));
    (m[0].max(T::zero()) + m[1].max(T::zero())).sqrt() * lit(2.0)
}

/// CHSH value of `rho` for fixed analyzer settings, from Born probabilities.
pub fn chsh_value<T: Real>(rho: &DensityOperator<T>, settings: &ChshSettings<T>) -> T {
    let e = settings.pairs().map(|(sa, sc)| {
        let p = born_probabilities(rho, &sa.projector(), &sc.projector());
        p[0] + p[3] - p[1] - p[2]
    });
    (e[0] - e[1] + e[2] + e[3]).abs()
}

/// `E = (N++ + N-- - N+- - N-+) / N` for outcome counts ordered
/// `(pass,pass), (pass,fail), (fail,pass), (fail,fail)`.
pub fn correlator_from_counts<T: Real>(counts: &[u64; 4]) -> Result<T> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Degenerate(
            "CHSH setting with zero total counts".into(),
        ));
    }
    let same = lit::<T>((counts[0] + counts[3]) as f64);
    let diff = lit::<T>((counts[1] + counts[2]) as f64);
    Ok((same - diff) / lit(total as f64))
}

/// CHSH value from counts at the four settings in [`ChshSettings::pairs`] order.
pub fn chsh_from_counts<T: Real>(counts: &[[u64; 4]; 4]) -> Result<T> {
    let e0 = correlator_from_counts::<T>(&counts[0])?;
    let e1 = correlator_from_counts::<T>(&counts[1])?;
    let e2 = correlator_from_counts::<T>(&counts[2])?;
    let e3 = correlator_from_counts::<T>(&counts[3])?;
    Ok((e0 - e1 + e2 + e3).abs())
}
