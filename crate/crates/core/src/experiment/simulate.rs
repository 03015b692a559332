use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{born_probabilities, WaveplateSetting};
use crate::rng::{poisson, substream};
use crate::tomography::{CountEntry, CountTable};

use super::config::{predict_rates, ExperimentConfig};

/// Poisson count table for the given analyzer settings.
///
/// Expected counts per outcome are `(signal + noise) * T * p`, with `p`
/// the Born probabilities of the effective (noise-mixed) state. Setting `k`
/// draws from RNG substream `k`, so the table is independent of threading.
pub fn run_tomography_counts(
    cfg: &ExperimentConfig<f64>,
    settings: &[(WaveplateSetting<f64>, WaveplateSetting<f64>)],
    duration_per_setting: f64,
    seed: u64,
) -> Result<CountTable<f64>> {
    if settings.is_empty() {
        return Err(Error::Domain("no analyzer settings given".into()));
    }
    if !(duration_per_setting >= 0.0 && duration_per_setting.is_finite()) {
        return Err(Error::Domain(format!(
            "duration per setting must be finite and nonnegative, got {duration_per_setting}"
        )));
    }
    let pred = predict_rates(cfg)?;
    let total_rate = pred.signal_coincidence_rate + pred.noise_coincidence_rate;
    let entries = settings
        .par_iter()
        .enumerate()
        .map(|(k, (a, c))| {
            let probs = born_probabilities(&pred.effective_state, &a.projector(), &c.projector());
            let mut rng = substream(seed, k as u64);
            CountEntry {
                arm_a: *a,
                arm_c: *c,
                counts: probs.map(|p| poisson(&mut rng, total_rate * duration_per_setting * p)),
                duration: duration_per_setting,
            }
        })
        .collect();
    Ok(CountTable::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{calibrate, CalibrationInputs, Scenario};
    use crate::quantum::{DensityOperator, EigenBasis, StateVector};
    use crate::tomography::tomography_settings;

    fn cfg() -> ExperimentConfig<f64> {
        calibrate(&CalibrationInputs::default()).unwrap().config(Scenario::ConvertedSs)
    }

    #[test]
    fn zero_duration_gives_zero_counts() {
        let t = run_tomography_counts(&cfg(), &tomography_settings(), 0.0, 3).unwrap();
        assert_eq!(t.len(), 36);
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn noiseless_bell_hh_setting() {
        let mut c = calibrate(&CalibrationInputs::default()).unwrap().config(Scenario::Initial);
        c.source.initial_state = DensityOperator::pure(&StateVector::bell_phi_plus());
        c.det_visible.dark_rate = 0.0;
        c.source.photon_flux_a = 0.0;
        let h = EigenBasis::H.setting();
        let t = run_tomography_counts(&c, &[(h, h)], 100.0, 1).unwrap();
        let n = t.entries()[0].counts;
        assert_eq!(n[1] + n[2], 0);
        let expect = 444.0 * 100.0 / 2.0;
        for k in [0, 3] {
            assert!((n[k] as f64 - expect).abs() < 5.0 * expect.sqrt(), "{n:?}");
        }
    }

    #[test]
    fn seed_determines_table() {
        let s = tomography_settings();
        let a = run_tomography_counts(&cfg(), &s, 1000.0, 9).unwrap();
        let b = run_tomography_counts(&cfg(), &s, 1000.0, 9).unwrap();
        let c = run_tomography_counts(&cfg(), &s, 1000.0, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_empty_settings_and_bad_duration() {
        assert!(run_tomography_counts(&cfg(), &[], 1.0, 0).is_err());
        assert!(run_tomography_counts(&cfg(), &tomography_settings(), -1.0, 0).is_err());
    }
}
