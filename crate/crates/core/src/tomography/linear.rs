use nalgebra::{Complex, DVector, Matrix4};

use super::{check_complete, design_matrix, observations, pauli_basis, CountTable};
use crate::error::{Error, Result};
use crate::quantum::{hermitian_eigen, DensityOperator};
use crate::scalar::{lit, Real};

/// Unit-trace Hermitian estimate from linear inversion. It may have negative
/// eigenvalues; those are reported, never clamped.
#[derive(Debug, Clone)]
pub struct LinearEstimate<T: Real> {
    pub matrix: Matrix4<Complex<T>>,
    pub min_eigenvalue: T,
}

impl<T: Real> LinearEstimate<T> {
    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue >= -T::validation_tol()
    }

    /// The estimate as a density operator, or a `Validation` error when it is
    /// not positive semidefinite.
    pub fn to_density(&self) -> Result<DensityOperator<T>> {
        DensityOperator::new(self.matrix)
    }
}

/// Least-squares solve for the 16 Pauli coefficients from per-setting
/// outcome frequencies.
pub fn linear_inversion<T: Real>(table: &CountTable<T>) -> Result<LinearEstimate<T>> {
    let obs = observations(table);
    let a = design_matrix(&obs);
    check_complete(&a)?;
    let f = DVector::from_iterator(obs.len(), obs.iter().map(|o| o.count / o.setting_total));
    let r = a
        .svd(true, true)
        .solve(&f, lit(1e-12))
        .map_err(|e| Error::IllPosed(e.to_string()))?;
    if r[0] <= T::zero() {
        return Err(Error::IllPosed("reconstructed trace is not positive".into()));
    }
    let basis = pauli_basis::<T>();
    let mut m = Matrix4::zeros();
    for (k, p) in basis.iter().enumerate() {
        m += p.scale(r[k] / r[0] * lit(0.25));
    }
    let m = (m + m.adjoint()).scale(lit(0.5));
    let (vals, _) = hermitian_eigen(&m);
    Ok(LinearEstimate {
        matrix: m,
        min_eigenvalue: vals[3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probabilities, StateVector};
    use crate::tomography::{tomography_settings, CountEntry};

    fn exact_table(rho: &DensityOperator<f64>, n: f64) -> CountTable<f64> {
        CountTable::new(
            tomography_settings()
                .into_iter()
                .map(|(a, c)| {
                    let p = born_probabilities(rho, &a.projector(), &c.projector());
                    CountEntry {
                        arm_a: a,
                        arm_c: c,
                        counts: p.map(|x| (x * n).round() as u64),
                        duration: 1.0,
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn recovers_bell_state_from_exact_frequencies() {
        let rho = DensityOperator::pure(&StateVector::bell_phi_plus());
        let est = linear_inversion(&exact_table(&rho, 1e6)).unwrap();
        let diff = (est.matrix - rho.matrix()).camax();
        assert!(diff < 1e-6, "{diff}");
        assert!(est.is_physical());
    }

    #[test]
    fn recovers_mixed_state() {
        let rho = DensityOperator::werner(0.6).unwrap();
        let est = linear_inversion(&exact_table(&rho, 1e8)).unwrap();
        assert!((est.matrix - rho.matrix()).camax() < 1e-7);
    }

    #[test]
    fn incomplete_settings_are_ill_posed() {
        let rho = DensityOperator::<f64>::maximally_mixed();
        let full = exact_table(&rho, 100.0);
        let only_z = CountTable::new(full.entries()[..2].to_vec());
        assert!(matches!(linear_inversion(&only_z), Err(Error::IllPosed(_))));
        let linear_only: Vec<_> = full
            .entries()
            .iter()
            .filter(|e| e.arm_a.qwp() == 0.0 && e.arm_c.qwp() == 0.0)
            .cloned()
            .collect();
        assert!(matches!(
            linear_inversion(&CountTable::new(linear_only)),
            Err(Error::IllPosed(_))
        ));
    }

    #[test]
    fn sparse_counts_can_be_unphysical() {
        // Pure state with a handful of counts per setting: the raw inverse
        // typically has a negative eigenvalue, which must be reported.
        let rho = DensityOperator::pure(&StateVector::bell_phi_plus());
        let mut table = exact_table(&rho, 4.0);
        table = table.map_counts(|n| n);
        let mut entries = table.entries().to_vec();
        entries[0].counts = [3, 1, 0, 0];
        let est = linear_inversion(&CountTable::new(entries)).unwrap();
        assert!(!est.is_physical());
        assert!(matches!(est.to_density(), Err(Error::Validation(_))));
        let tr: f64 = (0..4).map(|i| est.matrix[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
    }
}
