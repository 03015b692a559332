use std::path::Path;

use qfconv_core::experiment::{calibrate, Calibration, CalibrationInputs, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub calibration: CalibrationInputs,
    pub sweep: SweepOptions,
    pub jitter: JitterOptions,
    pub simulate: SimulateOptions,
    pub reconstruct: ReconstructOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitterOptions {
    /// Expected true coincidences per histogram.
    pub events: f64,
    /// Expected flat-background counts per histogram.
    pub background_events: f64,
    pub acquisition_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateOptions {
    pub scenario: Scenario,
    /// Total acquisition time, split evenly over the 36 settings.
    pub duration_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructOptions {
    pub bootstrap_resamples: usize,
    pub mle_tol: f64,
    pub mle_max_iter: usize,
}

/// Loaded configuration, its raw bytes (for hashing) and the calibration it
/// implies.
pub struct Loaded {
    pub config: RunConfig,
    pub raw: Vec<u8>,
    pub calibration: Calibration,
}

pub fn load(path: Option<&Path>) -> CliResult<Loaded> {
    let (raw, origin) = match path {
        Some(p) => (
            std::fs::read(p).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        None => (DEFAULT_CONFIG.as_bytes().to_vec(), "<bundled default>".to_string()),
    };
    let config: RunConfig =
        serde_json::from_slice(&raw).map_err(|e| CliError::usage(format!("config {origin}: {e}")))?;
    validate(&config).map_err(|e| e.context(format!("config {origin}")))?;
    let calibration = calibrate(&config.calibration).map_err(|e| CliError::from(e).context(format!("config {origin}: calibration")))?;
    Ok(Loaded { config, raw, calibration })
}

fn validate(c: &RunConfig) -> CliResult<()> {
    if c.schema_version != SCHEMA_VERSION {
        return Err(CliError::usage(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            c.schema_version
        )));
    }
    let s = &c.sweep;
    if !(s.p_min_mw >= 0.0 && s.p_max_mw >= s.p_min_mw && s.steps >= 1) {
        return Err(CliError::usage("sweep: need 0 <= p_min_mw <= p_max_mw and steps >= 1"));
    }
    let j = &c.jitter;
    if !(j.events >= 0.0 && j.background_events >= 0.0 && j.acquisition_s > 0.0) {
        return Err(CliError::usage(
            "jitter: events and background_events must be >= 0, acquisition_s > 0",
        ));
    }
    if !(c.simulate.duration_s >= 0.0 && c.simulate.duration_s.is_finite()) {
        return Err(CliError::usage("simulate.duration_s must be finite and >= 0"));
    }
    let r = &c.reconstruct;
    if !(r.mle_tol > 0.0 && r.mle_max_iter >= 1) {
        return Err(CliError::usage("reconstruct: need mle_tol > 0 and mle_max_iter >= 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_default_loads() {
        let l = load(None).unwrap();
        assert_eq!(l.config.schema_version, SCHEMA_VERSION);
        assert_eq!(l.config.calibration, CalibrationInputs::default());
    }

    #[test]
    fn unknown_field_is_named() {
        let text = DEFAULT_CONFIG.replace("\"seed\"", "\"sead\"");
        let err = serde_json::from_str::<RunConfig>(&text).unwrap_err().to_string();
        assert!(err.contains("sead"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let mut c: RunConfig = serde_json::from_str(DEFAULT_CONFIG).unwrap();
        c.schema_version = 2;
        assert!(validate(&c).is_err());
    }
}
