//! Least-squares fit of a bin-integrated Gaussian peak on a flat background.
//!
//! The background is estimated first from bins far from the peak (beyond
//! three times a half-maximum width guess) and held fixed; area, center and
//! width are then refined by Levenberg-Marquardt. Integrating the model over
//! each bin keeps the width unbiased when the peak spans only a few bins.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::tdc::TdcHistogram;
use crate::error::{Error, Result};
use crate::scalar::{fwhm_per_sigma, lit, to_f64, Real};

const MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQuality<T: Real> {
    /// Residual sum of squares after background subtraction.
    pub rss: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit<T: Real> {
    /// Integrated peak area in counts.
    pub amplitude: T,
    /// ps
    pub center: T,
    /// ps
    pub fwhm: T,
    /// Counts per bin.
    pub background: T,
    pub residual: FitQuality<T>,
}

impl<T: Real> GaussianFit<T> {
    pub fn sigma(&self) -> T {
        self.fwhm / fwhm_per_sigma::<T>()
    }

    fn to_f64_fit(self) -> GaussianFit<f64> {
        GaussianFit {
            amplitude: to_f64(self.amplitude),
            center: to_f64(self.center),
            fwhm: to_f64(self.fwhm),
            background: to_f64(self.background),
            residual: FitQuality {
                rss: to_f64(self.residual.rss),
                iterations: self.residual.iterations,
                converged: self.residual.converged,
            },
        }
    }
}

fn pdf<T: Real>(z: T) -> T {
    (-(z * z) * lit(0.5)).exp() / (T::PI() * lit(2.0)).sqrt()
}

fn cdf<T: Real>(z: T) -> T {
    (T::one() + (z / T::SQRT_2()).erf()) * lit(0.5)
}

struct Binned<T> {
    lo: Vec<T>,
    hi: Vec<T>,
    y: Vec<T>,
}

impl<T: Real> Binned<T> {
    /// Model values and Jacobian rows for parameters `(area, center, sigma)`.
    fn eval(&self, p: &Vector3<T>) -> Vec<(T, Vector3<T>)> {
        let (area, mu, sigma) = (p[0], p[1], p[2]);
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&lo, &hi)| {
                let zl = (lo - mu) / sigma;
                let zh = (hi - mu) / sigma;
                let mass = cdf(zh) - cdf(zl);
                let (pl, ph) = (pdf(zl), pdf(zh));
                let grad = Vector3::new(
                    mass,
                    area * (pl - ph) / sigma,
                    area * (pl * zl - ph * zh) / sigma,
                );
                (area * mass, grad)
            })
            .collect()
    }

    fn rss(&self, p: &Vector3<T>, background: T) -> T {
        self.eval(p)
            .iter()
            .zip(&self.y)
            .fold(T::zero(), |acc, ((m, _), &y)| {
                let r = y - background - *m;
                acc + r * r
            })
    }
}

pub fn fit_gaussian<T: Real>(hist: &TdcHistogram) -> Result<GaussianFit<T>> {
    let n = hist.bins();
    if n < 6 {
        return Err(Error::Domain(format!(
            "Gaussian fit needs at least 6 bins, got {n}"
        )));
    }
    if hist.total() == 0 {
        return Err(Error::Degenerate("histogram has no counts".into()));
    }
    let data: Binned<T> = Binned {
        lo: hist.edges[..n].iter().map(|&e| lit(e)).collect(),
        hi: hist.edges[1..].iter().map(|&e| lit(e)).collect(),
        y: hist.counts.iter().map(|&c| lit(c as f64)).collect(),
    };
    let centers: Vec<T> = (0..n).map(|i| lit(hist.bin_center(i))).collect();
    let mean_width: T = lit((hist.edges[n] - hist.edges[0]) / n as f64);

    // Initial guesses from the peak bin and its half-maximum run.
    let peak = (0..n)
        .max_by(|&a, &b| hist.counts[a].cmp(&hist.counts[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let y_max = data.y[peak];
    let y_min = data.y.iter().fold(y_max, |m, &v| m.min(v));
    let half = y_min + (y_max - y_min) * lit(0.5);
    let (mut left, mut right) = (peak, peak);
    while left > 0 && data.y[left - 1] >= half {
        left -= 1;
    }
    while right + 1 < n && data.y[right + 1] >= half {
        right += 1;
    }
    let fwhm_guess = (data.hi[right] - data.lo[left]).max(mean_width);
    let center_guess = centers[peak];

    let far = lit::<T>(3.0) * fwhm_guess;
    let mut tail: Vec<T> = (0..n)
        .filter(|&i| (centers[i] - center_guess).abs() > far)
        .map(|i| data.y[i])
        .collect();
    if tail.len() < 2 {
        tail = vec![data.y[0], data.y[1], data.y[n - 2], data.y[n - 1]];
    }
    let background = tail.iter().fold(T::zero(), |a, &v| a + v) / lit(tail.len() as f64);

    let area_guess = data
        .y
        .iter()
        .fold(T::zero(), |a, &v| a + (v - background).max(T::zero()));
    let sigma_min = mean_width * lit(1e-3);
    let mut p = Vector3::new(area_guess, center_guess, fwhm_guess / fwhm_per_sigma::<T>());
    let mut rss = data.rss(&p, background);
    let mut lambda: T = lit(1e-3);
    let tiny: T = lit(1e-12);

    let finish = |p: &Vector3<T>, rss: T, iterations: usize, converged: bool| GaussianFit {
        amplitude: p[0],
        center: p[1],
        fwhm: p[2] * fwhm_per_sigma::<T>(),
        background,
        residual: FitQuality {
            rss,
            iterations,
            converged,
        },
    };

    for iter in 1..=MAX_ITER {
        let rows = data.eval(&p);
        let mut jtj = Matrix3::<T>::zeros();
        let mut jtr = Vector3::<T>::zeros();
        for ((m, g), &y) in rows.iter().zip(&data.y) {
            let r = y - background - *m;
            jtj += g * g.transpose();
            jtr += g * r;
        }
        loop {
            let mut a = jtj;
            for k in 0..3 {
                a[(k, k)] += lambda * (jtj[(k, k)] + tiny);
            }
            let step = match a.lu().solve(&jtr) {
                Some(s) => s,
                None => {
                    lambda *= lit(10.0);
                    if lambda > lit(1e12) {
                        return Ok(finish(&p, rss, iter, true));
                    }
                    continue;
                }
            };
            let mut trial = p + step;
            trial[0] = trial[0].max(T::zero());
            trial[2] = trial[2].max(sigma_min);
            let trial_rss = data.rss(&trial, background);
            if trial_rss <= rss {
                let gain = rss - trial_rss;
                p = trial;
                rss = trial_rss;
                lambda = (lambda * lit(0.1)).max(lit(1e-12));
                if gain <= lit::<T>(1e-12) * rss.max(T::one()) {
                    return Ok(finish(&p, rss, iter, true));
                }
                break;
            }
            lambda *= lit(10.0);
            if lambda > lit(1e12) {
                // No descent direction left: p is a local minimum.
                return Ok(finish(&p, rss, iter, true));
            }
        }
    }
    let partial = finish(&p, rss, MAX_ITER, false);
    Err(Error::FitFailed {
        iterations: MAX_ITER,
        reason: "Levenberg-Marquardt did not converge".into(),
        partial: Box::new(partial.to_f64_fit()),
    })
}
