use rayon::prelude::*;

use super::{metrics, mle_reconstruct, mle_reconstruct_from, CountTable, MetricsReport, MleOptions, ReconstructionResult};
use crate::error::{Error, Result};
use crate::rng::{poisson, substream};

pub const MIN_RESAMPLES: usize = 100;

/// MLE reconstruction with Poisson-bootstrap uncertainties.
///
/// Each resample redraws every count from a Poisson law with the observed
/// count as mean, on its own RNG substream, and is reconstructed starting
/// from the point estimate. Values are the point-estimate metrics; sigmas
/// are sample standard deviations over resamples. The output depends only
/// on `seed`, not on the thread count.
pub fn bootstrap_metrics(
    table: &CountTable<f64>,
    n_resamples: usize,
    seed: u64,
    options: MleOptions<f64>,
) -> Result<(ReconstructionResult<f64>, MetricsReport<f64>)> {
    if n_resamples < MIN_RESAMPLES {
        return Err(Error::Domain(format!(
            "bootstrap needs at least {MIN_RESAMPLES} resamples, got {n_resamples}"
        )));
    }
    let point = mle_reconstruct(table, options)?;
    let values = metrics(&point.rho).values();

    let samples: Vec<[f64; 5]> = (0..n_resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let resampled = table.map_counts(|n| poisson(&mut rng, n as f64));
            mle_reconstruct_from(&resampled, &point.rho, options).map(|r| metrics(&r.rho).values())
        })
        .collect::<Result<_>>()?;

    let n = samples.len() as f64;
    let sigmas = std::array::from_fn(|k| {
        let mean = samples.iter().map(|s| s[k]).sum::<f64>() / n;
        let var = samples.iter().map(|s| (s[k] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt()
    });
    Ok((point, MetricsReport::from_parts(values, sigmas)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probabilities, DensityOperator};
    use crate::tomography::{tomography_settings, CountEntry};

    fn table(n: f64) -> CountTable<f64> {
        let rho = DensityOperator::werner(0.9).unwrap();
        CountTable::new(
            tomography_settings()
                .into_iter()
                .map(|(a, c)| {
                    let p = born_probabilities(&rho, &a.projector(), &c.projector());
                    CountEntry {
                        arm_a: a,
                        arm_c: c,
                        counts: p.map(|x| (x * n).round() as u64),
                        duration: 1.0,
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn rejects_too_few_resamples() {
        assert!(matches!(
            bootstrap_metrics(&table(100.0), 10, 1, MleOptions::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let t = table(400.0);
        let opts = MleOptions { tol: 1e-8, max_iter: 2000 };
        let (_, a) = bootstrap_metrics(&t, 100, 11, opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (_, b) = pool.install(|| bootstrap_metrics(&t, 100, 11, opts)).unwrap();
        assert_eq!(a, b);
        assert!(a.fidelity.sigma > 0.0 && a.fidelity.sigma < 0.05);
        let (_, c) = bootstrap_metrics(&t, 100, 12, opts).unwrap();
        assert_ne!(a.fidelity.sigma, c.fidelity.sigma);
    }
}
