use serde::Serialize;

use crate::quantum::{chsh_optimal, chsh_value, eof, fidelity_to_pure, purity, ChshSettings, DensityOperator, StateVector};
use crate::scalar::Real;

/// A value with its one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub sigma: T,
}

impl<T: Real> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Self { value, sigma: T::zero() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport<T> {
    /// Fidelity with `|phi+>`.
    pub fidelity: Estimate<T>,
    pub eof: Estimate<T>,
    pub purity: Estimate<T>,
    /// CHSH value at the standard linear-analyzer settings.
    pub s_parameter: Estimate<T>,
    /// CHSH value at the settings optimal for the state.
    pub s_optimal: Estimate<T>,
}

impl<T: Real> MetricsReport<T> {
    pub(crate) fn values(&self) -> [T; 5] {
        [
            self.fidelity.value,
            self.eof.value,
            self.purity.value,
            self.s_parameter.value,
            self.s_optimal.value,
        ]
    }

    pub(crate) fn from_parts(values: [T; 5], sigmas: [T; 5]) -> Self {
        let e = |i: usize| Estimate {
            value: values[i],
            sigma: sigmas[i],
        };
        Self {
            fidelity: e(0),
            eof: e(1),
            purity: e(2),
            s_parameter: e(3),
            s_optimal: e(4),
        }
    }
}

/// Point metrics of `rho` (all sigmas zero).
pub fn metrics<T: Real>(rho: &DensityOperator<T>) -> MetricsReport<T> {
    let values = [
        fidelity_to_pure(rho, &StateVector::bell_phi_plus()),
        eof(rho),
        purity(rho),
        chsh_value(rho, &ChshSettings::standard()),
        chsh_optimal(rho),
    ];
    MetricsReport::from_parts(values, [T::zero(); 5])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_state_metrics() {
        let m = metrics(&DensityOperator::<f64>::pure(&StateVector::bell_phi_plus()));
        assert!((m.fidelity.value - 1.0).abs() < 1e-12);
        assert!((m.eof.value - 1.0).abs() < 1e-9);
        assert!((m.purity.value - 1.0).abs() < 1e-12);
        assert!((m.s_parameter.value - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((m.s_optimal.value - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(m.fidelity.sigma, 0.0);
    }

    #[test]
    fn werner_metrics() {
        let p = 0.9;
        let m = metrics(&DensityOperator::<f64>::werner(p).unwrap());
        assert!((m.fidelity.value - (1.0 + 3.0 * p) / 4.0).abs() < 1e-12);
        assert!((m.purity.value - (1.0 + 3.0 * p * p) / 4.0).abs() < 1e-12);
        assert!((m.s_optimal.value - 2.0 * 2f64.sqrt() * p).abs() < 1e-9);
    }
}
