//! Setup parameters fixed from measured rates.
//!
//! Inputs are the pair rate at the source, the three pair-jitter FWHMs and
//! the (signal, noise) coincidence rates observed after conversion with an
//! SSPD on the telecom arm and either a Si-APD or an SSPD on the visible
//! arm. Outputs are the unmeasured quantities: single-detector jitters,
//! telecom throughput, Si-APD efficiency and dark rate, visible photon flux
//! and the SNR signal scale.

use serde::{Deserialize, Serialize};

use crate::conversion::{amplitudes, efficiency, noise_singles_rate, ConversionParams};
use crate::detection::{calibrate_jitters, pair_jitter_fwhm, window_acceptance, DetectorSpec, JitterCalibration, TdcConfig};
use crate::error::{Error, Result};
use crate::quantum::DensityOperator;

use super::config::{ExperimentConfig, InterferometerSpec, SourceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Source state analyzed before conversion.
    Initial,
    /// Si-APD on the visible arm, SSPD on the telecom arm.
    ConvertedAs,
    /// SSPDs on both arms.
    ConvertedSs,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Initial, Scenario::ConvertedAs, Scenario::ConvertedSs];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::Initial => "initial",
            Scenario::ConvertedAs => "converted_as",
            Scenario::ConvertedSs => "converted_ss",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.label() == key)
            .ok_or_else(|| Error::Domain(format!("unknown scenario '{s}' (initial, converted_as, converted_ss)")))
    }
}

/// Measured and assumed inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationInputs {
    pub rep_rate_hz: f64,
    pub pair_rate_hz: f64,
    /// Fidelity of the source state with `|phi+>`, modelled as white noise.
    pub initial_fidelity: f64,
    pub eta_tau_sq_per_w: f64,
    pub pump_power_w: f64,
    pub raman_coeff_hz_per_w: f64,
    pub telecom_dark_hz: f64,
    /// Pair FWHMs (ps) for APD+APD, Si-APD+SSPD, SSPD+SSPD.
    pub pair_fwhm_ps: [f64; 3],
    /// (signal, noise) coincidence rates, Hz.
    pub rates_as_hz: [f64; 2],
    pub rates_ss_hz: [f64; 2],
    pub sspd_visible_efficiency: f64,
    pub sspd_visible_dark_hz: f64,
    pub sspd_telecom_efficiency: f64,
    pub ingaas_efficiency: f64,
    pub ingaas_dark_hz: f64,
    pub throughput_visible: f64,
    pub interferometer_delay_ps: f64,
    pub postselect_success: f64,
    pub tdc_bin_ps: f64,
    pub tdc_window_ps: f64,
}

impl Default for CalibrationInputs {
    fn default() -> Self {
        Self {
            rep_rate_hz: 82e6,
            pair_rate_hz: 444.0,
            initial_fidelity: 0.97,
            eta_tau_sq_per_w: 3.6,
            pump_power_w: 0.160,
            raman_coeff_hz_per_w: 80e3,
            telecom_dark_hz: 266.0,
            pair_fwhm_ps: [350.0, 290.0, 150.0],
            rates_as_hz: [0.285, 0.039],
            rates_ss_hz: [0.265, 0.015],
            sspd_visible_efficiency: 0.32,
            sspd_visible_dark_hz: 100.0,
            sspd_telecom_efficiency: 0.125,
            ingaas_efficiency: 0.15,
            ingaas_dark_hz: 1e4,
            throughput_visible: 1.0,
            interferometer_delay_ps: 700.0,
            postselect_success: 0.5,
            tdc_bin_ps: 100.0,
            tdc_window_ps: 200.0,
        }
    }
}

/// Derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub inputs: CalibrationInputs,
    pub jitters: JitterCalibration<f64>,
    pub throughput_telecom: f64,
    pub si_apd_efficiency: f64,
    pub si_apd_dark_hz: f64,
    pub photon_flux_a_hz: f64,
    /// White-noise weight `p` of the source state `p |phi+><phi+| + (1-p) I/4`.
    pub werner_weight: f64,
    /// SNR scale `a` (Hz) reproducing signal/noise at the working pump power.
    pub signal_scale_as: f64,
    pub signal_scale_ss: f64,
}

impl Calibration {
    pub fn sspd_visible(&self) -> DetectorSpec<f64> {
        let i = &self.inputs;
        DetectorSpec {
            label: "SSPD-780".into(),
            efficiency: i.sspd_visible_efficiency,
            dark_rate: i.sspd_visible_dark_hz,
            jitter_fwhm: self.jitters.sspd,
        }
    }

    pub fn sspd_telecom(&self) -> DetectorSpec<f64> {
        let i = &self.inputs;
        DetectorSpec {
            label: "SSPD-1522".into(),
            efficiency: i.sspd_telecom_efficiency,
            dark_rate: i.telecom_dark_hz,
            jitter_fwhm: self.jitters.sspd,
        }
    }

    pub fn si_apd(&self) -> DetectorSpec<f64> {
        DetectorSpec {
            label: "Si-APD".into(),
            efficiency: self.si_apd_efficiency,
            dark_rate: self.si_apd_dark_hz,
            jitter_fwhm: self.jitters.si_apd,
        }
    }

    pub fn ingaas_apd(&self) -> DetectorSpec<f64> {
        let i = &self.inputs;
        DetectorSpec {
            label: "InGaAs-APD".into(),
            efficiency: i.ingaas_efficiency,
            dark_rate: i.ingaas_dark_hz,
            jitter_fwhm: self.jitters.ingaas_apd,
        }
    }

    /// Detector pairs (visible, telecom) of the three jitter measurements.
    pub fn jitter_pairings(&self) -> [(DetectorSpec<f64>, DetectorSpec<f64>); 3] {
        [
            (self.si_apd(), self.ingaas_apd()),
            (self.si_apd(), self.sspd_telecom()),
            (self.sspd_visible(), self.sspd_telecom()),
        ]
    }

    pub fn initial_state(&self) -> DensityOperator<f64> {
        DensityOperator::werner(self.werner_weight).expect("calibrated weight lies in [0, 1]")
    }

    pub fn config(&self, scenario: Scenario) -> ExperimentConfig<f64> {
        let i = &self.inputs;
        let conversion = |scale| ConversionParams {
            eta_tau_sq: i.eta_tau_sq_per_w,
            pump_power: i.pump_power_w,
            pump_phase: 0.0,
            raman_coeff: i.raman_coeff_hz_per_w,
            dark_rate: i.telecom_dark_hz,
            signal_scale: scale,
        };
        let (conversion, det_visible, det_telecom) = match scenario {
            Scenario::Initial => (None, self.si_apd(), self.si_apd()),
            Scenario::ConvertedAs => (Some(conversion(self.signal_scale_as)), self.si_apd(), self.sspd_telecom()),
            Scenario::ConvertedSs => (Some(conversion(self.signal_scale_ss)), self.sspd_visible(), self.sspd_telecom()),
        };
        let interferometer = |success| InterferometerSpec {
            delay: i.interferometer_delay_ps,
            postselect_success: success,
        };
        ExperimentConfig {
            source: SourceSpec {
                rep_rate: i.rep_rate_hz,
                pair_coincidence_rate: i.pair_rate_hz,
                reference_efficiency: self.si_apd_efficiency,
                photon_flux_a: self.photon_flux_a_hz,
                initial_state: self.initial_state(),
            },
            encoder: interferometer(1.0),
            decoder: interferometer(i.postselect_success),
            conversion,
            det_visible,
            det_telecom,
            tdc: TdcConfig {
                bin_width: i.tdc_bin_ps,
                window_width: i.tdc_window_ps,
                window_center: 0.0,
            },
            throughput_visible: i.throughput_visible,
            throughput_telecom: self.throughput_telecom,
        }
    }
}

/// Solves the rate model for the unmeasured setup parameters.
///
/// The source pair rate is referenced to the Si-APD, so the Si-APD+SSPD
/// signal fixes the telecom throughput and the SSPD+SSPD signal then fixes
/// the Si-APD efficiency. Accidentals `R_v (b P + d) w` give the visible
/// singles rate of each configuration, from which the visible photon flux
/// (SSPD) and the Si-APD dark rate follow.
pub fn calibrate(inputs: &CalibrationInputs) -> Result<Calibration> {
    let i = inputs;
    for (v, name) in [
        (i.pair_rate_hz, "pair_rate_hz"),
        (i.rates_as_hz[0], "AS signal rate"),
        (i.rates_as_hz[1], "AS noise rate"),
        (i.rates_ss_hz[0], "SS signal rate"),
        (i.rates_ss_hz[1], "SS noise rate"),
        (i.sspd_visible_efficiency, "sspd_visible_efficiency"),
        (i.sspd_telecom_efficiency, "sspd_telecom_efficiency"),
        (i.tdc_window_ps, "tdc_window_ps"),
        (i.throughput_visible, "throughput_visible"),
        (i.postselect_success, "postselect_success"),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(0.25..=1.0).contains(&i.initial_fidelity) {
        return Err(Error::Domain(format!(
            "initial_fidelity must lie in [0.25, 1], got {}",
            i.initial_fidelity
        )));
    }
    let [apd_apd, apd_sspd, sspd_sspd] = i.pair_fwhm_ps;
    let jitters = calibrate_jitters(apd_apd, apd_sspd, sspd_sspd)?;

    let params = ConversionParams::new(
        i.eta_tau_sq_per_w,
        i.pump_power_w,
        0.0,
        i.raman_coeff_hz_per_w,
        i.telecom_dark_hz,
        1.0,
    )?;
    let conv_prob = amplitudes(&params).conversion_probability();
    let telecom_noise = noise_singles_rate(&params);
    if !(conv_prob > 0.0 && telecom_noise > 0.0) {
        return Err(Error::Degenerate("pump power gives no conversion or no background".into()));
    }

    let spec = |jitter| DetectorSpec {
        label: String::new(),
        efficiency: 1.0,
        dark_rate: 0.0,
        jitter_fwhm: jitter,
    };
    let acc = |a, b| window_acceptance(pair_jitter_fwhm(&spec(a), &spec(b)), i.tdc_window_ps);
    let chain = i.pair_rate_hz * conv_prob * i.postselect_success * i.sspd_telecom_efficiency;

    let throughput_telecom = i.rates_as_hz[0] / (chain * acc(jitters.si_apd, jitters.sspd));
    let si_apd_efficiency =
        i.sspd_visible_efficiency * chain * throughput_telecom * acc(jitters.sspd, jitters.sspd) / i.rates_ss_hz[0];

    let window_s = i.tdc_window_ps * 1e-12;
    let singles_as = i.rates_as_hz[1] / (telecom_noise * window_s);
    let singles_ss = i.rates_ss_hz[1] / (telecom_noise * window_s);
    let photon_flux_a_hz =
        (singles_ss - i.sspd_visible_dark_hz) / (i.sspd_visible_efficiency * i.throughput_visible);
    let si_apd_dark_hz = singles_as - photon_flux_a_hz * i.throughput_visible * si_apd_efficiency;

    if !(throughput_telecom > 0.0 && throughput_telecom <= 1.0) {
        return Err(Error::Domain(format!(
            "rates imply telecom throughput {throughput_telecom}, outside (0, 1]"
        )));
    }
    if !(si_apd_efficiency > 0.0 && si_apd_efficiency <= 1.0) {
        return Err(Error::Domain(format!(
            "rates imply Si-APD efficiency {si_apd_efficiency}, outside (0, 1]"
        )));
    }
    if !(photon_flux_a_hz >= 0.0 && si_apd_dark_hz >= 0.0) {
        return Err(Error::Domain(format!(
            "noise rates imply negative flux or dark rate ({photon_flux_a_hz}, {si_apd_dark_hz})"
        )));
    }

    let werner_weight = (4.0 * i.initial_fidelity - 1.0) / 3.0;
    let scale = |[s, n]: [f64; 2]| (s / n) * telecom_noise / efficiency(&params);

    Ok(Calibration {
        inputs: inputs.clone(),
        jitters,
        throughput_telecom,
        si_apd_efficiency,
        si_apd_dark_hz,
        photon_flux_a_hz,
        werner_weight,
        signal_scale_as: scale(i.rates_as_hz),
        signal_scale_ss: scale(i.rates_ss_hz),
    })
}
