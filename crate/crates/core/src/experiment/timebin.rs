//! Polarization to time-bin encoding and the matched-slot decoder.

use nalgebra::{Complex, Matrix2, Matrix4};

use crate::conversion::ConversionAmplitudes;
use crate::quantum::DensityOperator;
use crate::scalar::{lit, Real};

/// Two-photon state with qubit C in the time-bin basis `{S1, L1}`
/// (index 0 = S1, index 1 = L1). Qubit A stays in `{H, V}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeBinState<T: Real> {
    rho: DensityOperator<T>,
}

impl<T: Real> TimeBinState<T> {
    pub fn density(&self) -> &DensityOperator<T> {
        &self.rho
    }
}

/// The encoder sends H through the short arm (with a polarization flip to a
/// common output polarization) and V through the long arm, so `H -> S1` and
/// `V -> L1`. The density matrix is unchanged; only its basis meaning moves.
pub fn encode_timebin<T: Real>(rho: &DensityOperator<T>) -> TimeBinState<T> {
    TimeBinState { rho: rho.clone() }
}

/// Conversion acts as `convert_amp * I` on both time bins, so the state
/// heralded on conversion is unchanged and is produced with probability
/// `|convert_amp|^2`.
pub fn apply_conversion<T: Real>(state: &TimeBinState<T>, amps: &ConversionAmplitudes<T>) -> (TimeBinState<T>, T) {
    let k = Matrix2::<Complex<T>>::identity() * amps.convert_amp;
    let prob = amps.conversion_probability();
    if prob <= T::zero() {
        return (state.clone(), T::zero());
    }
    let m = apply_on_c(state.rho.matrix(), &k).unscale(prob);
    (
        TimeBinState {
            rho: DensityOperator::from_matrix_unchecked(m),
        },
        prob,
    )
}

/// Kraus operators of the decoding interferometer followed by time-slot
/// detection, mapping `{S1, L1}` to polarization `{H, V}`:
/// early slot, central slot, late slot.
pub fn decoder_kraus<T: Real>() -> [Matrix2<Complex<T>>; 3] {
    let h = Complex::new(lit::<T>(0.5).sqrt(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    [
        Matrix2::new(h, z, z, z),
        Matrix2::new(h, z, z, h),
        Matrix2::new(z, z, z, h),
    ]
}

/// Keeps the central time slot (S1-L2 or L1-S2 paths), where the two time
/// bins overlap and the polarization entanglement is restored. Returns the
/// kept polarization state and its probability.
pub fn decode_timebin<T: Real>(state: &TimeBinState<T>) -> (DensityOperator<T>, T) {
    let [_, mid, _] = decoder_kraus::<T>();
    let m = apply_on_c(state.rho.matrix(), &mid);
    let prob = m.trace().re;
    (DensityOperator::from_matrix_unchecked(m.unscale(prob)), prob)
}

fn apply_on_c<T: Real>(rho: &Matrix4<Complex<T>>, k: &Matrix2<Complex<T>>) -> Matrix4<Complex<T>> {
    let full = Matrix2::<Complex<T>>::identity().kronecker(k);
    full * rho * full.adjoint()
}
