//! Pump-driven difference-frequency conversion of a single signal mode.
//!
//! With coupling `sqrt(eta P) e^{i phi}` and crystal transit time `tau`, the
//! converted-mode output operator is
//! `a_c,out = e^{-i phi} sin(sqrt(eta P) tau) a_s + cos(sqrt(eta P) tau) a_c`.
//! Only the product `eta tau^2` enters, so it is the stored parameter.

mod optimize;

pub use optimize::{golden_section_max, optimize_pump, sweep, PumpOptimum, SweepRow};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Conversion and background-noise parameters, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionParams<T: Real> {
    /// `eta tau^2` in 1/W.
    pub eta_tau_sq: T,
    /// W
    pub pump_power: T,
    /// rad
    pub pump_phase: T,
    /// Raman noise slope `b` in Hz/W.
    pub raman_coeff: T,
    /// Dark-count rate `d` in Hz.
    pub dark_rate: T,
    /// Signal scale `a` in Hz.
    pub signal_scale: T,
}

impl<T: Real> ConversionParams<T> {
    pub fn new(
        eta_tau_sq: T,
        pump_power: T,
        pump_phase: T,
        raman_coeff: T,
        dark_rate: T,
        signal_scale: T,
    ) -> Result<Self> {
        let p = Self {
            eta_tau_sq,
            pump_power,
            pump_phase,
            raman_coeff,
            dark_rate,
            signal_scale,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.eta_tau_sq > T::zero(), "eta_tau_sq must be positive"),
            (self.pump_power >= T::zero(), "pump_power must be nonnegative"),
            (self.raman_coeff >= T::zero(), "raman_coeff must be nonnegative"),
            (self.dark_rate >= T::zero(), "dark_rate must be nonnegative"),
            (self.signal_scale > T::zero(), "signal_scale must be positive"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Validation(format!("conversion parameters: {msg}"))),
            None => Ok(()),
        }
    }

    pub fn with_pump_power(&self, pump_power: T) -> Self {
        Self {
            pump_power,
            ..*self
        }
    }

    /// `sqrt(eta P) tau`.
    pub fn coupling_angle(&self) -> T {
        (self.eta_tau_sq * self.pump_power).sqrt()
    }

    /// Pump power of the first conversion maximum, `(pi/2)^2 / (eta tau^2)`.
    pub fn full_conversion_power(&self) -> T {
        let half_pi = T::FRAC_PI_2();
        half_pi * half_pi / self.eta_tau_sq
    }
}

/// Mode amplitudes after the crystal: the converted share of the signal
/// mode and the retained share of the converted-mode input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionAmplitudes<T: Real> {
    pub convert_amp: Complex<T>,
    pub retain_amp: T,
}

impl<T: Real> ConversionAmplitudes<T> {
    /// `|convert_amp|^2`.
    pub fn conversion_probability(&self) -> T {
        self.convert_amp.norm_sqr()
    }
}

pub fn amplitudes<T: Real>(params: &ConversionParams<T>) -> ConversionAmplitudes<T> {
    let (s, c) = params.coupling_angle().sin_cos();
    let (ps, pc) = params.pump_phase.sin_cos();
    ConversionAmplitudes {
        convert_amp: Complex::new(pc * s, -(ps * s)),
        retain_amp: c,
    }
}

/// Internal conversion probability `sin^2(sqrt(eta P) tau)`.
pub fn efficiency<T: Real>(params: &ConversionParams<T>) -> T {
    let s = params.coupling_angle().sin();
    s * s
}

/// Background singles at the telecom detector, `b P + d` (Hz).
pub fn noise_singles_rate<T: Real>(params: &ConversionParams<T>) -> T {
    params.raman_coeff * params.pump_power + params.dark_rate
}

/// `a sin^2(sqrt(eta P) tau) / (b P + d)`.
pub fn snr<T: Real>(params: &ConversionParams<T>) -> Result<T> {
    let noise = noise_singles_rate(params);
    if !(noise > T::zero()) {
        return Err(Error::Degenerate(
            "signal-to-noise ratio undefined: b P + d = 0".into(),
        ));
    }
    Ok(params.signal_scale * efficiency(params) / noise)
}
