//! Two-qubit state reconstruction from coincidence counts.

mod bootstrap;
mod linear;
mod mle;
mod report;
mod scheme;
mod table;

pub use bootstrap::bootstrap_metrics;
pub use linear::{linear_inversion, LinearEstimate};
pub use mle::{mle_reconstruct, mle_reconstruct_from, MleOptions, ReconstructionResult};
pub use report::{metrics, Estimate, MetricsReport};
pub use scheme::{chsh_count_settings, tomography_settings};
pub use table::{CountEntry, CountTable, OutcomeCounts, COUNT_TABLE_COLUMNS};

use nalgebra::{Complex, DMatrix, Vector4};

use crate::error::{Error, Result};
use crate::quantum::pauli;
use crate::scalar::{lit, Real};

/// One rank-1 outcome projector `|v><v|` with its observed count.
pub(crate) struct Observation<T: Real> {
    pub ket: Vector4<Complex<T>>,
    pub count: T,
    /// Total counts of the setting this outcome belongs to.
    pub setting_total: T,
}

pub(crate) fn observations<T: Real>(table: &CountTable<T>) -> Vec<Observation<T>> {
    table
        .entries()
        .iter()
        .filter(|e| e.total() > 0)
        .flat_map(|e| {
            let kets = e.arm_a.projector().joint_outcome_kets(&e.arm_c.projector());
            let total = lit::<T>(e.total() as f64);
            kets.into_iter().zip(e.counts).map(move |(ket, n)| Observation {
                ket,
                count: lit(n as f64),
                setting_total: total,
            })
        })
        .collect()
}

/// Two-qubit Pauli products `sigma_mu (x) sigma_nu`, index `4 mu + nu`.
pub(crate) fn pauli_basis<T: Real>() -> Vec<nalgebra::Matrix4<Complex<T>>> {
    (0..16)
        .map(|k| pauli::<T>(k / 4).kronecker(&pauli::<T>(k % 4)))
        .collect()
}

/// Design matrix mapping Pauli coefficients `r` (with `rho = sum r P / 4`)
/// to outcome probabilities, one row per observation.
pub(crate) fn design_matrix<T: Real>(obs: &[Observation<T>]) -> DMatrix<T> {
    let basis = pauli_basis::<T>();
    DMatrix::from_fn(obs.len(), 16, |r, c| {
        let v = &obs[r].ket;
        (v.adjoint() * basis[c] * v)[(0, 0)].re * lit(0.25)
    })
}

/// Fails unless the measured projectors span the two-qubit operator space.
pub(crate) fn check_complete<T: Real>(a: &DMatrix<T>) -> Result<()> {
    if a.nrows() < 16 {
        return Err(Error::IllPosed(format!(
            "only {} outcome projectors with data; at least 16 are required",
            a.nrows()
        )));
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(T::zero(), |m, &v| m.max(v));
    let rank = sv.iter().filter(|&&v| v > max * lit(1e-10)).count();
    if rank < 16 {
        return Err(Error::IllPosed(format!(
            "measurement settings are not informationally complete (rank {rank} < 16)"
        )));
    }
    Ok(())
}
