//! Simulation and analysis of polarization-entangled photon pairs sent
//! through a visible-to-telecom frequency converter: conversion model,
//! detector timing, time-bin transfer, count simulation and two-qubit
//! tomography.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conversion;
pub mod detection;
pub mod error;
pub mod experiment;
pub mod io;
pub mod quantum;
pub mod rng;
pub mod scalar;
pub mod tomography;

pub use error::{Error, Result};

pub type DensityOperator = quantum::DensityOperator<f64>;
pub type StateVector = quantum::StateVector<f64>;
pub type WaveplateSetting = quantum::WaveplateSetting<f64>;
pub type ConversionParams = conversion::ConversionParams<f64>;
pub type DetectorSpec = detection::DetectorSpec<f64>;
pub type TdcConfig = detection::TdcConfig<f64>;
pub type GaussianFit = detection::GaussianFit<f64>;
pub type ExperimentConfig = experiment::ExperimentConfig<f64>;
pub type RatePrediction = experiment::RatePrediction<f64>;
pub type CountTable = tomography::CountTable<f64>;
pub type MetricsReport = tomography::MetricsReport<f64>;
