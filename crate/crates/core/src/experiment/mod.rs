//! Source, time-bin transfer, conversion and detection chain.

mod calibration;
mod config;
mod simulate;
mod timebin;

pub use calibration::{calibrate, Calibration, CalibrationInputs, Scenario};
pub use config::{predict_rates, ExperimentConfig, InterferometerSpec, RatePrediction, SourceSpec};
pub use simulate::run_tomography_counts;
pub use timebin::{apply_conversion, decode_timebin, decoder_kraus, encode_timebin, TimeBinState};
