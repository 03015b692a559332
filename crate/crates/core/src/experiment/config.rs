use serde::{Deserialize, Serialize};

use crate::conversion::{amplitudes, noise_singles_rate, ConversionParams};
use crate::detection::{coincidence_noise_rate, pair_jitter_fwhm, window_acceptance, DetectorSpec, TdcConfig};
use crate::error::{Error, Result};
use crate::quantum::DensityOperator;
use crate::scalar::Real;

use super::timebin::{apply_conversion, decode_timebin, encode_timebin};

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec<T: Real> {
    /// Pump pulse repetition rate, Hz.
    pub rep_rate: T,
    /// Detected pair rate before conversion, Hz, measured with visible
    /// detectors of efficiency `reference_efficiency` on both arms.
    pub pair_coincidence_rate: T,
    pub reference_efficiency: T,
    /// Photon flux of arm A reaching the visible detector input, Hz.
    pub photon_flux_a: T,
    pub initial_state: DensityOperator<T>,
}

impl<T: Real> SourceSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_coincidence_rate > T::zero() && self.pair_coincidence_rate < self.rep_rate) {
            return Err(Error::Validation(format!(
                "need 0 < pair_coincidence_rate < rep_rate, got {:?} and {:?}",
                self.pair_coincidence_rate, self.rep_rate
            )));
        }
        if !(self.reference_efficiency > T::zero() && self.reference_efficiency <= T::one()) {
            return Err(Error::Validation("reference_efficiency must lie in (0, 1]".into()));
        }
        if !(self.photon_flux_a >= T::zero()) {
            return Err(Error::Validation("photon_flux_a must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSpec<T: Real> {
    /// Long/short path difference, ps.
    pub delay: T,
    /// Fraction of photons leaving through the kept output.
    pub postselect_success: T,
}

impl<T: Real> InterferometerSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.delay > T::zero()) {
            return Err(Error::Validation("interferometer delay must be positive".into()));
        }
        if !(self.postselect_success > T::zero() && self.postselect_success <= T::one()) {
            return Err(Error::Validation("postselect_success must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Full setup. With `conversion = None` the pair is analyzed directly at
/// the source with the visible detector on both arms.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T: Real> {
    pub source: SourceSpec<T>,
    pub encoder: InterferometerSpec<T>,
    pub decoder: InterferometerSpec<T>,
    pub conversion: Option<ConversionParams<T>>,
    pub det_visible: DetectorSpec<T>,
    pub det_telecom: DetectorSpec<T>,
    pub tdc: TdcConfig<T>,
    pub throughput_visible: T,
    pub throughput_telecom: T,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.encoder.validate()?;
        self.decoder.validate()?;
        if let Some(c) = &self.conversion {
            c.validate()?;
        }
        self.det_visible.validate()?;
        self.det_telecom.validate()?;
        self.tdc.validate()?;
        for (t, name) in [
            (self.throughput_visible, "throughput_visible"),
            (self.throughput_telecom, "throughput_telecom"),
        ] {
            if !(t > T::zero() && t <= T::one()) {
                return Err(Error::Validation(format!("{name} must lie in (0, 1], got {t:?}")));
            }
        }
        Ok(())
    }

    /// Singles rate at the visible detector, Hz.
    pub fn visible_singles_rate(&self) -> T {
        self.source.photon_flux_a * self.throughput_visible * self.det_visible.efficiency + self.det_visible.dark_rate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePrediction<T: Real> {
    /// Hz
    pub signal_coincidence_rate: T,
    /// Hz
    pub noise_coincidence_rate: T,
    pub effective_state: DensityOperator<T>,
}

impl<T: Real> RatePrediction<T> {
    /// Noise fraction `noise / (signal + noise)`.
    pub fn noise_fraction(&self) -> T {
        let total = self.signal_coincidence_rate + self.noise_coincidence_rate;
        if total > T::zero() {
            self.noise_coincidence_rate / total
        } else {
            T::zero()
        }
    }
}

/// Expected in-window coincidence rates and the state they analyze.
///
/// The telecom background `b P + d` of the conversion parameters is the
/// rate seen by the telecom detector, so it enters the accidentals as is.
/// Background is unpolarized and mixes in as `I/4`.
pub fn predict_rates<T: Real>(cfg: &ExperimentConfig<T>) -> Result<RatePrediction<T>> {
    cfg.validate()?;
    let visible_singles = cfg.visible_singles_rate();
    let eff_ratio = cfg.det_visible.efficiency / cfg.source.reference_efficiency;

    let (signal, noise, state) = match &cfg.conversion {
        None => {
            let signal = cfg.source.pair_coincidence_rate * eff_ratio * eff_ratio;
            let noise = coincidence_noise_rate(visible_singles, visible_singles, &cfg.tdc);
            (signal, noise, cfg.source.initial_state.clone())
        }
        Some(params) => {
            let encoded = encode_timebin(&cfg.source.initial_state);
            let (converted, conv_prob) = apply_conversion(&encoded, &amplitudes(params));
            let (decoded, _) = decode_timebin(&converted);
            let pair_fwhm = pair_jitter_fwhm(&cfg.det_visible, &cfg.det_telecom);
            let signal = cfg.source.pair_coincidence_rate
                * eff_ratio
                * conv_prob
                * cfg.encoder.postselect_success
                * cfg.decoder.postselect_success
                * cfg.throughput_telecom
                * cfg.det_telecom.efficiency
                * window_acceptance(pair_fwhm, cfg.tdc.window_width);
            let noise = coincidence_noise_rate(visible_singles, noise_singles_rate(params), &cfg.tdc);
            (signal, noise, decoded)
        }
    };

    let total = signal + noise;
    let lambda = if total > T::zero() { noise / total } else { T::zero() };
    Ok(RatePrediction {
        signal_coincidence_rate: signal,
        noise_coincidence_rate: noise,
        effective_state: state.mix_with_white_noise(lambda)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{calibrate, CalibrationInputs, Scenario};
    use crate::quantum::{fidelity_to_pure, StateVector};

    fn ss() -> ExperimentConfig<f64> {
        calibrate(&CalibrationInputs::default()).unwrap().config(Scenario::ConvertedSs)
    }

    #[test]
    fn noiseless_conversion_keeps_decoded_state() {
        let mut cfg = ss();
        let c = cfg.conversion.as_mut().unwrap();
        c.raman_coeff = 0.0;
        c.dark_rate = 0.0;
        let p = predict_rates(&cfg).unwrap();
        assert_eq!(p.noise_coincidence_rate, 0.0);
        assert_eq!(p.noise_fraction(), 0.0);
        assert!((p.effective_state.matrix() - cfg.source.initial_state.matrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn affine_fidelity_law() {
        let cfg = ss();
        let p = predict_rates(&cfg).unwrap();
        let psi = StateVector::bell_phi_plus();
        let lam = p.noise_fraction();
        let f_dec = fidelity_to_pure(&cfg.source.initial_state, &psi);
        let f_eff = fidelity_to_pure(&p.effective_state, &psi);
        assert!((f_eff - ((1.0 - lam) * f_dec + lam / 4.0)).abs() < 1e-9);
    }

    #[test]
    fn signal_linear_in_pair_rate() {
        let cfg = ss();
        let mut doubled = cfg.clone();
        doubled.source.pair_coincidence_rate *= 2.0;
        let a = predict_rates(&cfg).unwrap();
        let b = predict_rates(&doubled).unwrap();
        assert_eq!(b.signal_coincidence_rate, 2.0 * a.signal_coincidence_rate);
        assert_eq!(b.noise_coincidence_rate, a.noise_coincidence_rate);
    }

    #[test]
    fn rejects_invalid_configs() {
        let mut cfg = ss();
        cfg.throughput_telecom = 0.0;
        assert!(matches!(predict_rates(&cfg), Err(Error::Validation(_))));
        let mut cfg = ss();
        cfg.source.pair_coincidence_rate = 1e9;
        assert!(matches!(predict_rates(&cfg), Err(Error::Validation(_))));
        let mut cfg = ss();
        cfg.decoder.postselect_success = 1.5;
        assert!(matches!(predict_rates(&cfg), Err(Error::Validation(_))));
        let mut cfg = ss();
        cfg.encoder.delay = 0.0;
        assert!(predict_rates(&cfg).is_err());
    }
}
