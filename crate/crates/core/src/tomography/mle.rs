use nalgebra::{Complex, Matrix4};

use super::{check_complete, design_matrix, observations, CountTable, Observation};
use crate::error::{Error, Result};
use crate::quantum::DensityOperator;
use crate::scalar::{lit, Real};

const MAX_RELAXATION: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions<T> {
    /// Stop once one iteration raises the log-likelihood per count by less
    /// than this.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for MleOptions<T> {
    fn default() -> Self {
        Self {
            tol: lit(1e-10),
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult<T: Real> {
    pub rho: DensityOperator<T>,
    pub log_likelihood: T,
    pub iterations: usize,
    pub converged: bool,
    /// Set when an observed outcome had a predicted probability below the
    /// floor and the floor was substituted.
    pub regularized: bool,
    /// Log-likelihood after each iteration, starting with the initial state.
    pub trace: Vec<T>,
}

/// Maximum-likelihood state from the iterative `R rho R` map, started at the
/// maximally mixed state.
pub fn mle_reconstruct<T: Real>(
    table: &CountTable<T>,
    options: MleOptions<T>,
) -> Result<ReconstructionResult<T>> {
    mle_reconstruct_from(table, &DensityOperator::maximally_mixed(), options)
}

/// As [`mle_reconstruct`], started from `start`.
///
/// Each iteration applies `M rho M` with `M = I + t (R - I)`; `t = 1` is the
/// plain `R rho R` map. If that step raises the likelihood, `t` is doubled
/// while the likelihood keeps rising. If it lowers the likelihood, `t` is
/// halved (the diluted map `(I + eps R) rho (I + eps R)`) until it does
/// not. The log-likelihood is therefore nondecreasing.
pub fn mle_reconstruct_from<T: Real>(
    table: &CountTable<T>,
    start: &DensityOperator<T>,
    options: MleOptions<T>,
) -> Result<ReconstructionResult<T>> {
    if !(options.tol > T::zero()) || options.max_iter == 0 {
        return Err(Error::Domain("MLE needs tol > 0 and max_iter >= 1".into()));
    }
    let obs = observations(table);
    check_complete(&design_matrix(&obs))?;
    let n_total = obs.iter().fold(T::zero(), |s, o| s + o.count);
    let mut ctx = Context {
        obs: obs.into_iter().filter(|o| o.count > T::zero()).collect(),
        n_total,
        regularized: false,
    };

    let mut rho = *start.matrix();
    let mut ll = ctx.log_likelihood(&rho);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    let eye = Matrix4::<Complex<T>>::identity();
    let stop_gain = options.tol * n_total.max(T::one());

    while iterations < options.max_iter {
        iterations += 1;
        let r = ctx.r_operator(&rho);
        let step = |ctx: &mut Context<T>, t: T| {
            let m = eye + (r - eye).scale(t);
            let next = normalize(&(m * rho * m));
            let next_ll = ctx.log_likelihood(&next);
            (next, next_ll)
        };
        let (mut next, mut next_ll) = step(&mut ctx, T::one());
        if next_ll >= ll {
            // Over-relax along the same direction while it keeps paying off.
            let mut t = T::one();
            while t < lit(MAX_RELAXATION) {
                t *= lit(2.0);
                let (cand, cand_ll) = step(&mut ctx, t);
                if cand_ll <= next_ll {
                    break;
                }
                next = cand;
                next_ll = cand_ll;
            }
        } else {
            // Diluted step: t = eps / (1 + eps) with eps halved each try.
            let mut t = T::one();
            while next_ll < ll && t > lit(1e-12) {
                t *= lit(0.5);
                (next, next_ll) = step(&mut ctx, t);
            }
            if next_ll < ll {
                next = rho;
                next_ll = ll;
            }
        }
        let gain = next_ll - ll;
        rho = next;
        ll = next_ll;
        trace.push(ll);
        if gain < stop_gain {
            converged = true;
            break;
        }
    }

    let rho = (rho + rho.adjoint()).scale(lit(0.5));
    Ok(ReconstructionResult {
        rho: DensityOperator::from_matrix_unchecked(normalize(&rho)),
        log_likelihood: ll,
        iterations,
        converged,
        regularized: ctx.regularized,
        trace,
    })
}

struct Context<T: Real> {
    obs: Vec<Observation<T>>,
    n_total: T,
    regularized: bool,
}

impl<T: Real> Context<T> {
    fn probability(&mut self, o: &Observation<T>, rho: &Matrix4<Complex<T>>) -> T {
        let p = (o.ket.adjoint() * rho * o.ket)[(0, 0)].re;
        if p < T::probability_floor() {
            self.regularized = true;
            T::probability_floor()
        } else {
            p
        }
    }

    fn log_likelihood(&mut self, rho: &Matrix4<Complex<T>>) -> T {
        let obs = std::mem::take(&mut self.obs);
        let ll = obs
            .iter()
            .fold(T::zero(), |s, o| s + o.count * self.probability(o, rho).ln());
        self.obs = obs;
        ll
    }

    fn r_operator(&mut self, rho: &Matrix4<Complex<T>>) -> Matrix4<Complex<T>> {
        let obs = std::mem::take(&mut self.obs);
        let mut r = Matrix4::zeros();
        for o in &obs {
            let w = o.count / (self.probability(o, rho) * self.n_total);
            r += (o.ket * o.ket.adjoint()).scale(w);
        }
        self.obs = obs;
        r
    }
}

fn normalize<T: Real>(m: &Matrix4<Complex<T>>) -> Matrix4<Complex<T>> {
    m.unscale(m.trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probabilities, fidelity_to_pure, StateVector};
    use crate::tomography::{linear_inversion, tomography_settings, CountEntry};

    fn exact_table(rho: &DensityOperator<f64>, n: f64) -> CountTable<f64> {
        CountTable::new(
            tomography_settings()
                .into_iter()
                .map(|(a, c)| {
                    let p = born_probabilities(rho, &a.projector(), &c.projector());
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
    fn bell_state_from_noiseless_counts() {
        let psi = StateVector::bell_phi_plus();
        let table = exact_table(&DensityOperator::pure(&psi), 1e6);
        let res = mle_reconstruct(&table, MleOptions::default()).unwrap();
        let f = fidelity_to_pure(&res.rho, &psi);
        assert!(f > 1.0 - 1e-6, "fidelity {f}, {} iterations", res.iterations);
    }

    #[test]
    fn likelihood_never_decreases() {
        let table = exact_table(&DensityOperator::werner(0.8).unwrap(), 500.0);
        let res = mle_reconstruct(&table, MleOptions::default()).unwrap();
        assert!(res.converged);
        for w in res.trace.windows(2) {
            assert!(w[1] >= w[0], "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn result_is_physical_where_linear_inversion_is_not() {
        let psi = StateVector::bell_phi_plus();
        let mut entries = exact_table(&DensityOperator::pure(&psi), 4.0).entries().to_vec();
        entries[0].counts = [3, 1, 0, 0];
        let table = CountTable::new(entries);
        assert!(!linear_inversion(&table).unwrap().is_physical());
        let res = mle_reconstruct(&table, MleOptions::default()).unwrap();
        assert!(DensityOperator::new(*res.rho.matrix()).is_ok());
    }

    #[test]
    fn rejects_bad_options_and_incomplete_data() {
        let table = exact_table(&DensityOperator::maximally_mixed(), 100.0);
        let bad = MleOptions { tol: 0.0, max_iter: 10 };
        assert!(matches!(mle_reconstruct(&table, bad), Err(Error::Domain(_))));
        let few = CountTable::new(table.entries()[..3].to_vec());
        assert!(matches!(
            mle_reconstruct(&few, MleOptions::default()),
            Err(Error::IllPosed(_))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let rho = DensityOperator::<f64>::werner(0.9).unwrap();
        let t64 = exact_table(&rho, 1e4);
        let t32 = CountTable::new(
            t64.entries()
                .iter()
                .map(|e| CountEntry {
                    arm_a: crate::quantum::WaveplateSetting::new(e.arm_a.qwp() as f32, e.arm_a.hwp() as f32),
                    arm_c: crate::quantum::WaveplateSetting::new(e.arm_c.qwp() as f32, e.arm_c.hwp() as f32),
                    counts: e.counts,
                    duration: 1.0f32,
                })
                .collect(),
        );
        let opts = MleOptions { tol: 1e-3f32, max_iter: 2000 };
        let res = mle_reconstruct(&t32, opts).unwrap();
        let f = fidelity_to_pure(&res.rho, &StateVector::<f32>::bell_phi_plus());
        assert!((f - 0.925).abs() < 1e-2, "{f}");
    }
}
