use std::fmt::Write as _;

use nalgebra::{Complex, Matrix2, Matrix4, Vector4};

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Two-qubit density operator: Hermitian, unit trace, positive semidefinite.
///
/// Construction through [`DensityOperator::new`] checks all three properties
/// at [`Real::validation_tol`]; every constructor that produces a state from
/// other valid states preserves them.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    m: Matrix4<Complex<T>>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(m: Matrix4<Complex<T>>) -> Result<Self> {
        validate(&m)?;
        Ok(Self { m })
    }

    /// Wraps `m` without validation; callers guarantee the invariants.
    pub(crate) fn from_matrix_unchecked(m: Matrix4<Complex<T>>) -> Self {
        Self { m }
    }

    pub fn pure(psi: &StateVector<T>) -> Self {
        let a = psi.amplitudes();
        Self { m: a * a.adjoint() }
    }

    /// `I / 4`.
    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix4::identity().scale(lit(0.25)),
        }
    }

    /// `rho_a (x) rho_c` from two single-qubit density matrices.
    pub fn product(rho_a: &Matrix2<Complex<T>>, rho_c: &Matrix2<Complex<T>>) -> Result<Self> {
        Self::new(rho_a.kronecker(rho_c))
    }

    pub fn matrix(&self) -> &Matrix4<Complex<T>> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix4<Complex<T>> {
        self.m
    }

    /// `tr(rho A)` for an arbitrary operator `A`.
    pub fn expectation(&self, op: &Matrix4<Complex<T>>) -> Complex<T> {
        (self.m * op).trace()
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> Vector4<T> {
        let (vals, _) = hermitian_eigen(&self.m);
        vals
    }

    /// Eigen decomposition `(values, vectors)` with values in decreasing
    /// order and eigenvectors as the matching columns.
    pub fn eigen(&self) -> (Vector4<T>, Matrix4<Complex<T>>) {
        hermitian_eigen(&self.m)
    }

    /// Principal square root, with eigenvalues in `[-tol, 0)` clamped to 0.
    pub fn sqrt(&self) -> Matrix4<Complex<T>> {
        let (vals, vecs) = hermitian_eigen(&self.m);
        let roots = vals.map(|v| Complex::new(v.max(T::zero()).sqrt(), T::zero()));
        vecs * Matrix4::from_diagonal(&roots) * vecs.adjoint()
    }

    /// Convex combination `(1 - lambda) self + lambda other`.
    pub fn mix(&self, other: &Self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::Domain(format!(
                "mixing fraction {lambda:?} outside [0, 1]"
            )));
        }
        let keep = Complex::new(T::one() - lambda, T::zero());
        let add = Complex::new(lambda, T::zero());
        Ok(Self {
            m: self.m * keep + other.m * add,
        })
    }

    /// `(1 - lambda) rho + lambda I/4`.
    pub fn mix_with_white_noise(&self, lambda: T) -> Result<Self> {
        self.mix(&Self::maximally_mixed(), lambda)
    }

    /// Werner state `p |phi+><phi+| + (1 - p) I/4`.
    pub fn werner(p: T) -> Result<Self> {
        Self::pure(&StateVector::bell_phi_plus()).mix_with_white_noise(T::one() - p)
    }

    /// Trace distance `1/2 ||self - other||_1`.
    pub fn trace_distance(&self, other: &Self) -> T {
        let (vals, _) = hermitian_eigen(&(self.m - other.m));
        vals.iter().fold(T::zero(), |acc, v| acc + v.abs()) * lit(0.5)
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> DensityOperator<U> {
        DensityOperator {
            m: self.m.map(|z| {
                Complex::new(lit::<U>(to_f64(z.re)), lit::<U>(to_f64(z.im)))
            }),
        }
    }

    /// Text matrix: 4 rows of 4 whitespace-separated `re+imj` entries.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..4 {
            for c in 0..4 {
                let z = self.m[(r, c)];
                if c > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:.16e}{:+.16e}j", to_f64(z.re), to_f64(z.im));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format and validates the result.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        if rows.len() != 4 {
            return Err(Error::Parse {
                line: rows.len().min(4) + 1,
                message: format!("expected 4 matrix rows, found {}", rows.len()),
            });
        }
        let mut m = Matrix4::zeros();
        for (r, (lineno, line)) in rows.iter().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected 4 entries, found {}", fields.len()),
                });
            }
            for (c, f) in fields.iter().enumerate() {
                let (re, im) = parse_complex(f).ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: format!("malformed complex entry '{f}'"),
                })?;
                m[(r, c)] = Complex::new(lit(re), lit(im));
            }
        }
        Self::new(m)
    }
}

fn parse_complex(s: &str) -> Option<(f64, f64)> {
    let body = s.strip_suffix('j')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].parse().ok()?;
    Some((re, im))
}

/// Checks Hermiticity, unit trace and positivity of `m`.
pub(crate) fn validate<T: Real>(m: &Matrix4<Complex<T>>) -> Result<()> {
    let tol = T::validation_tol();
    let asym = (m - m.adjoint())
        .iter()
        .fold(T::zero(), |acc, z| acc.max(z.norm_sqr().sqrt()));
    if asym > tol {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (max |M - M^dagger| = {asym:?})"
        )));
    }
    let tr = m.trace();
    if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Validation(format!("trace is {tr:?}, expected 1")));
    }
    let (vals, _) = hermitian_eigen(m);
    let min = vals[3];
    if min < -tol {
        return Err(Error::Validation(format!(
            "matrix is not positive semidefinite (min eigenvalue {min:?})"
        )));
    }
    Ok(())
}

/// Eigen decomposition of a Hermitian 4x4 matrix, values in decreasing order.
pub(crate) fn hermitian_eigen<T: Real>(
    m: &Matrix4<Complex<T>>,
) -> (Vector4<T>, Matrix4<Complex<T>>) {
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let herm = (m + m.adjoint()) * half;
    let eig = herm.symmetric_eigen();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = Vector4::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vecs = Matrix4::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> DensityOperator<f64> {
        DensityOperator::pure(&StateVector::bell_phi_plus())
    }

    #[test]
    fn white_noise_limits() {
        let rho = phi();
        assert_eq!(rho.mix_with_white_noise(0.0).unwrap(), rho);
        let full = rho.mix_with_white_noise(1.0).unwrap();
        assert!(full.trace_distance(&DensityOperator::maximally_mixed()) < 1e-12);
        assert!(matches!(
            rho.mix_with_white_noise(1.5),
            Err(Error::Domain(_))
        ));
        assert!(rho.mix_with_white_noise(-0.1).is_err());
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = Matrix4::<Complex<f64>>::identity();
        assert!(DensityOperator::new(m).is_err());
        m = Matrix4::identity().scale(0.25);
        m[(0, 1)] = Complex::new(0.0, 0.1);
        assert!(DensityOperator::new(m).is_err());
        let mut neg = Matrix4::<Complex<f64>>::zeros();
        neg[(0, 0)] = Complex::new(1.5, 0.0);
        neg[(1, 1)] = Complex::new(-0.5, 0.0);
        assert!(DensityOperator::new(neg).is_err());
    }

    #[test]
    fn eigenvalues_descend() {
        let rho = DensityOperator::<f64>::werner(0.9).unwrap();
        let v = rho.eigenvalues();
        assert!((v[0] - 0.925).abs() < 1e-12);
        for k in 1..4 {
            assert!((v[k] - 0.025).abs() < 1e-12);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let rho = DensityOperator::<f64>::werner(0.7).unwrap();
        let s = rho.sqrt();
        assert!((s * s - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn text_format_round_trip() {
        let rho = DensityOperator::<f64>::werner(0.8).unwrap();
        let mut m = *rho.matrix();
        m[(0, 3)] = Complex::new(0.3, -0.05);
        m[(3, 0)] = Complex::new(0.3, 0.05);
        let rho = DensityOperator::new(m).unwrap();
        let text = rho.to_text();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().next().unwrap().contains("-5.0000000000000003e-2j"));
        let back = DensityOperator::<f64>::parse_text(&text).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn parse_reports_line() {
        let text = "1+0j 0+0j 0+0j 0+0j\n0+0j 0+0j 0+0j\n";
        match DensityOperator::<f64>::parse_text(text) {
            Err(Error::Parse { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let bad = "1e0+0e0j 0+0j 0+0j 0+0j\n0+0j 0+0j x 0+0j\n0+0j 0+0j 0+0j 0+0j\n0+0j 0+0j 0+0j 0+0j\n";
        match DensityOperator::<f64>::parse_text(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_complex_handles_exponents() {
        assert_eq!(parse_complex("1.5e-3-2e+1j"), Some((1.5e-3, -20.0)));
        assert_eq!(parse_complex("-0.25+0j"), Some((-0.25, 0.0)));
        assert_eq!(parse_complex("0.25"), None);
    }
}
