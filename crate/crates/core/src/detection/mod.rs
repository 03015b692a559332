//! Detector timing: per-detector jitter, coincidence-window acceptance,
//! accidental coincidences, TDC histograms and their Gaussian fits.

mod fit;
mod tdc;

pub use fit::{fit_gaussian, FitQuality, GaussianFit};
pub use tdc::{simulate_tdc, TdcHistogram};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fwhm_per_sigma, lit, Real};

/// Single-photon detector: efficiency, dark-count rate (Hz) and Gaussian
/// timing jitter FWHM (ps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec<T: Real> {
    pub label: String,
    pub efficiency: T,
    pub dark_rate: T,
    pub jitter_fwhm: T,
}

impl<T: Real> DetectorSpec<T> {
    pub fn new(label: impl Into<String>, efficiency: T, dark_rate: T, jitter_fwhm: T) -> Result<Self> {
        let d = Self {
            label: label.into(),
            efficiency,
            dark_rate,
            jitter_fwhm,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency >= T::zero() && self.efficiency <= T::one()) {
            return Err(Error::Validation(format!(
                "detector '{}': efficiency {:?} outside [0, 1]",
                self.label, self.efficiency
            )));
        }
        if !(self.dark_rate >= T::zero()) {
            return Err(Error::Validation(format!(
                "detector '{}': negative dark rate {:?}",
                self.label, self.dark_rate
            )));
        }
        if !(self.jitter_fwhm > T::zero()) {
            return Err(Error::Validation(format!(
                "detector '{}': jitter FWHM must be positive, got {:?}",
                self.label, self.jitter_fwhm
            )));
        }
        Ok(())
    }
}

/// TDC binning and coincidence window, all in ps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdcConfig<T: Real> {
    pub bin_width: T,
    pub window_width: T,
    pub window_center: T,
}

impl<T: Real> TdcConfig<T> {
    pub fn new(bin_width: T, window_width: T, window_center: T) -> Result<Self> {
        let c = Self {
            bin_width,
            window_width,
            window_center,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > T::zero()) {
            return Err(Error::Validation(format!(
                "TDC bin width must be positive, got {:?}",
                self.bin_width
            )));
        }
        if !(self.window_width > T::zero()) {
            return Err(Error::Validation(format!(
                "coincidence window must be positive, got {:?}",
                self.window_width
            )));
        }
        Ok(())
    }
}

/// Start-stop delay FWHM of a detector pair: independent Gaussian jitters
/// add in quadrature.
pub fn pair_jitter_fwhm<T: Real>(d1: &DetectorSpec<T>, d2: &DetectorSpec<T>) -> T {
    d1.jitter_fwhm.hypot(d2.jitter_fwhm)
}

/// Fraction of a centered Gaussian delay distribution inside the window.
pub fn window_acceptance<T: Real>(pair_fwhm: T, window: T) -> T {
    let sigma = pair_fwhm / fwhm_per_sigma::<T>();
    (window / (lit::<T>(2.0) * sigma * T::SQRT_2())).erf()
}

/// Accidental coincidence rate (Hz) between a start channel and temporally
/// uniform stop noise: `start * stop * window`.
pub fn coincidence_noise_rate<T: Real>(start_rate: T, stop_noise_rate: T, cfg: &TdcConfig<T>) -> T {
    start_rate * stop_noise_rate * cfg.window_width * lit(1e-12)
}

/// Per-detector jitters recovered from three measured pair FWHMs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterCalibration<T: Real> {
    pub sspd: T,
    pub si_apd: T,
    pub ingaas_apd: T,
}

/// Solves for single-detector FWHMs given the pair FWHMs of
/// (Si-APD, InGaAs-APD), (Si-APD, SSPD) and (SSPD, SSPD).
///
/// Four detectors and three pairings leave one degree of freedom; the two
/// SSPDs are taken to have equal jitter.
pub fn calibrate_jitters<T: Real>(apd_apd: T, apd_sspd: T, sspd_sspd: T) -> Result<JitterCalibration<T>> {
    let sspd_sq = sspd_sspd * sspd_sspd * lit(0.5);
    let si_sq = apd_sspd * apd_sspd - sspd_sq;
    let ingaas_sq = apd_apd * apd_apd - si_sq;
    if !(sspd_sq > T::zero() && si_sq > T::zero() && ingaas_sq > T::zero()) {
        return Err(Error::Domain(format!(
            "pair FWHMs ({apd_apd:?}, {apd_sspd:?}, {sspd_sspd:?}) admit no positive single-detector jitters"
        )));
    }
    Ok(JitterCalibration {
        sspd: sspd_sq.sqrt(),
        si_apd: si_sq.sqrt(),
        ingaas_apd: ingaas_sq.sqrt(),
    })
}
