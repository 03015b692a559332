//! Two-qubit polarization states and the metrics computed on them.
//!
//! The global basis order is `(HH, HV, VH, VV)`: index `2 * a + c` with
//! `0 = H` and `1 = V` on arm A (first qubit) and arm C (second qubit).

mod chsh;
mod density;
mod metrics;
mod pauli;
mod projector;
mod state;

pub use chsh::{
    chsh_from_counts, chsh_optimal, chsh_value, correlation_matrix, correlator_from_counts,
    ChshSettings,
};
pub use density::DensityOperator;
pub(crate) use density::hermitian_eigen;
pub use metrics::{binary_entropy, concurrence, eof, eof_from_concurrence, fidelity_to_pure, purity};
pub use pauli::{bloch_vector, pauli};
pub use projector::{
    born_probabilities, hwp_jones, projector_from_waveplates, qwp_jones, EigenBasis, MeasurementProjector,
    WaveplateSetting,
};
pub use state::StateVector;

pub use nalgebra::Complex;
