use crate::quantum::{ChshSettings, EigenBasis, WaveplateSetting};
use crate::scalar::Real;

/// The 36 overcomplete settings: every pair of the six Pauli eigenstates,
/// arm A outer, in `H, V, D, A, R, L` order.
pub fn tomography_settings<T: Real>() -> Vec<(WaveplateSetting<T>, WaveplateSetting<T>)> {
    EigenBasis::ALL
        .iter()
        .flat_map(|&a| EigenBasis::ALL.iter().map(move |&c| (a.setting(), c.setting())))
        .collect()
}

/// The four CHSH setting pairs for `settings`, in evaluation order.
pub fn chsh_count_settings<T: Real>(settings: &ChshSettings<T>) -> Vec<(WaveplateSetting<T>, WaveplateSetting<T>)> {
    settings.pairs().to_vec()
}
