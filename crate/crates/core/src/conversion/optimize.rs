//! Pump-power choice: maximize the signal-to-noise ratio over a power range.
//!
//! A 1 mW grid locates the best basin, golden-section search refines within
//! one grid step on either side.

use super::{efficiency, noise_singles_rate, ConversionParams};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Coarse grid spacing in W.
const GRID_STEP_W: f64 = 1e-3;
/// Golden-section bracket width at termination, in W.
const REFINE_TOL_W: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpOptimum<T: Real> {
    /// W
    pub power: T,
    pub snr: T,
}

/// SNR at `power`, continued to its `P -> 0` limit `a eta tau^2 / b` when
/// the dark rate vanishes.
fn objective<T: Real>(params: &ConversionParams<T>, power: T) -> Result<T> {
    let p = params.with_pump_power(power);
    let noise = noise_singles_rate(&p);
    if noise > T::zero() {
        return Ok(p.signal_scale * efficiency(&p) / noise);
    }
    if params.raman_coeff > T::zero() {
        return Ok(p.signal_scale * p.eta_tau_sq / p.raman_coeff);
    }
    Err(Error::Degenerate(
        "signal-to-noise ratio undefined: b = d = 0".into(),
    ))
}

/// Maximizes `f` on `[lo, hi]` by golden-section search. Returns `(x, f(x))`.
pub fn golden_section_max<T: Real, F>(f: F, lo: T, hi: T, tol: T) -> Result<(T, T)>
where
    F: Fn(T) -> Result<T>,
{
    let inv_phi = (lit::<T>(5.0).sqrt() - T::one()) * lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a) > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Pump power in `[p_min, p_max]` (W) maximizing the signal-to-noise ratio.
pub fn optimize_pump<T: Real>(params: &ConversionParams<T>, p_min: T, p_max: T) -> Result<PumpOptimum<T>> {
    if !(p_min >= T::zero() && p_min < p_max) {
        return Err(Error::Domain(format!(
            "pump range [{p_min:?}, {p_max:?}] must satisfy 0 <= p_min < p_max"
        )));
    }
    params.validate()?;
    let step: T = lit(GRID_STEP_W);
    let n = ((p_max - p_min) / step).ceil().to_usize().unwrap_or(1).max(1);
    let grid = |i: usize| (p_min + step * lit(i as f64)).min(p_max);

    let mut best = (0usize, objective(params, p_min)?);
    for i in 1..=n {
        let v = objective(params, grid(i))?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = grid(best.0.saturating_sub(1));
    let hi = grid((best.0 + 1).min(n));
    let (x, v) = golden_section_max(|p| objective(params, p), lo, hi, lit(REFINE_TOL_W))?;
    let grid_best = PumpOptimum {
        power: grid(best.0),
        snr: best.1,
    };
    Ok(if v > grid_best.snr {
        PumpOptimum { power: x, snr: v }
    } else {
        grid_best
    })
}

/// One row of a pump-power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T: Real> {
    /// W
    pub power: T,
    pub efficiency: T,
    /// Hz
    pub noise: T,
    /// `None` where `b P + d = 0`.
    pub snr: Option<T>,
}

/// `steps` evenly spaced powers from `p_min` to `p_max` inclusive; a single
/// step samples `p_min` only.
pub fn sweep<T: Real>(params: &ConversionParams<T>, p_min: T, p_max: T, steps: usize) -> Result<Vec<SweepRow<T>>> {
    if steps == 0 || !(p_min >= T::zero() && p_max >= p_min) {
        return Err(Error::Domain(format!(
            "invalid sweep: {steps} steps over [{p_min:?}, {p_max:?}]"
        )));
    }
    let denom = lit::<T>((steps.max(2) - 1) as f64);
    Ok((0..steps)
        .map(|i| {
            let power = p_min + (p_max - p_min) * lit::<T>(i as f64) / denom;
            let p = params.with_pump_power(power);
            SweepRow {
                power,
                efficiency: efficiency(&p),
                noise: noise_singles_rate(&p),
                snr: super::snr(&p).ok(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params() -> ConversionParams<f64> {
        ConversionParams::new(3.6, 0.16, 0.0, 80e3, 266.0, 1.0).unwrap()
    }

    /// Brute-force maximizer on a 0.01 mW grid.
    fn dense_oracle(params: &ConversionParams<f64>, lo: f64, hi: f64) -> f64 {
        let n = ((hi - lo) / 1e-5).round() as usize;
        (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .filter(|&p| p > 0.0 || params.dark_rate > 0.0)
            .map(|p| {
                let q = params.with_pump_power(p);
                let s = (q.eta_tau_sq * p).sqrt().sin();
                (p, q.signal_scale * s * s / (q.raman_coeff * p + q.dark_rate))
            })
            .fold((lo, f64::MIN), |best, (p, v)| if v > best.1 { (p, v) } else { best })
            .0
    }

    #[test]
    fn reference_optimum_near_50_mw() {
        let opt = optimize_pump(&reference_params(), 0.0, 0.7).unwrap();
        assert!((opt.power - 0.050).abs() < 0.005, "{opt:?}");
        assert!((opt.power - dense_oracle(&reference_params(), 0.0, 0.7)).abs() < 2e-4);
    }

    #[test]
    fn snr_gain_from_lower_pump() {
        let p = reference_params();
        let at = |w: f64| super::super::snr(&p.with_pump_power(w)).unwrap();
        let ratio = at(0.05) / at(0.7);
        assert!((ratio - 2.2).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn no_dark_counts_pushes_optimum_down() {
        let mut p = reference_params();
        p.dark_rate = 0.0;
        let opt = optimize_pump(&p, 0.0, 0.7).unwrap();
        assert!(opt.power < 0.050);
        assert!(opt.power < 1e-3, "{opt:?}");
    }

    #[test]
    fn no_raman_noise_maximizes_efficiency() {
        let mut p = reference_params();
        p.raman_coeff = 0.0;
        let opt = optimize_pump(&p, 0.0, 0.7).unwrap();
        assert!((opt.power - p.full_conversion_power()).abs() < 1e-4);
        let capped = optimize_pump(&p, 0.0, 0.3).unwrap();
        assert!((capped.power - 0.3).abs() < 1e-9);
    }

    #[test]
    fn bad_bounds() {
        assert!(optimize_pump(&reference_params(), 0.2, 0.1).is_err());
        assert!(optimize_pump(&reference_params(), -0.1, 0.1).is_err());
        assert!(optimize_pump(&reference_params(), 0.1, 0.1).is_err());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, v) = golden_section_max(|x: f64| Ok(-(x - 0.3) * (x - 0.3) + 2.0), 0.0, 1.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_shapes() {
        let rows = sweep(&reference_params(), 0.0, 0.7, 701).unwrap();
        assert_eq!(rows.len(), 701);
        assert!((rows[160].power - 0.16).abs() < 1e-12);
        let one = sweep(&reference_params(), 0.05, 0.7, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].power, 0.05);
        assert!(sweep(&reference_params(), 0.0, 0.7, 0).is_err());
    }
}
