use nalgebra::{Complex, Matrix2, Matrix4, Vector2};
use proptest::prelude::*;
use qfconv_core::conversion::{optimize_pump, snr, ConversionParams};
use qfconv_core::detection::{fit_gaussian, simulate_tdc, DetectorSpec, GaussianFit, TdcConfig};
use qfconv_core::experiment::{
    calibrate, decode_timebin, encode_timebin, predict_rates, run_tomography_counts, CalibrationInputs, Scenario,
};
use qfconv_core::quantum::{
    born_probabilities, chsh_optimal, chsh_value, concurrence, fidelity_to_pure, hwp_jones, purity, qwp_jones,
    ChshSettings, DensityOperator, StateVector, WaveplateSetting,
};
use qfconv_core::rng::substream;
use qfconv_core::tomography::{
    linear_inversion, mle_reconstruct, tomography_settings, CountEntry, CountTable, MleOptions,
};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// Ginibre-distributed random state of rank `rank`.
fn random_state<R: Rng>(rng: &mut R, rank: usize) -> DensityOperator<f64> {
    let mut m = Matrix4::<Complex<f64>>::zeros();
    for _ in 0..rank {
        let v = nalgebra::Vector4::from_fn(|_, _| {
            c(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        m += v * v.adjoint();
    }
    let tr = m.trace().re;
    DensityOperator::new(m.unscale(tr)).unwrap()
}

fn exact_counts(rho: &DensityOperator<f64>, n: f64) -> CountTable<f64> {
    CountTable::new(
        tomography_settings()
            .into_iter()
            .map(|(a, c)| CountEntry {
                arm_a: a,
                arm_c: c,
                counts: born_probabilities(rho, &a.projector(), &c.projector()).map(|p| (p * n).round() as u64),
                duration: 1.0,
            })
            .collect(),
    )
}

fn poisson_counts(rho: &DensityOperator<f64>, n: f64, seed: u64) -> CountTable<f64> {
    let mut rng = substream(seed, 0);
    CountTable::new(
        tomography_settings()
            .into_iter()
            .map(|(a, c)| CountEntry {
                arm_a: a,
                arm_c: c,
                counts: born_probabilities(rho, &a.projector(), &c.projector())
                    .map(|p| qfconv_core::rng::poisson(&mut rng, p * n)),
                duration: 1.0,
            })
            .collect(),
    )
}

#[test]
fn tsirelson_bound_on_random_states() {
    let mut rng = substream(2024, 0);
    let bound = 2.0 * 2f64.sqrt() + 1e-9;
    for i in 0..10_000 {
        let rho = random_state(&mut rng, 1 + i % 4);
        let s_opt = chsh_optimal(&rho);
        assert!(s_opt <= bound, "state {i}: S = {s_opt}");
        assert!(chsh_value(&rho, &ChshSettings::standard()) <= s_opt + 1e-9);
    }
}

#[test]
fn projector_idempotence_over_angles() {
    let mut rng = substream(5, 0);
    for _ in 0..1000 {
        let s = WaveplateSetting::<f64>::new(rng.random_range(-3.2..3.2), rng.random_range(-3.2..3.2));
        let p = s.projector();
        let op = p.operator();
        assert!((op * op - op).iter().all(|z| z.norm() < 1e-12));
        assert!((op.trace().re - 1.0).abs() < 1e-12);
        let sum = op + p.complement().operator();
        assert!((sum - Matrix2::identity()).iter().all(|z| z.norm() < 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn waveplates_are_unitary(theta in -10.0f64..10.0) {
        for m in [hwp_jones(theta), qwp_jones(theta)] {
            let d = m.adjoint() * m - Matrix2::identity();
            prop_assert!(d.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn affine_fidelity_mixing(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = substream(seed, 0);
        let rho = random_state(&mut rng, 1 + (seed % 4) as usize);
        let psi = StateVector::bell_phi_plus();
        let mixed = rho.mix_with_white_noise(lambda).unwrap();
        let expect = (1.0 - lambda) * fidelity_to_pure(&rho, &psi) + lambda / 4.0;
        prop_assert!((fidelity_to_pure(&mixed, &psi) - expect).abs() < 1e-9);
        prop_assert!(DensityOperator::new(*mixed.matrix()).is_ok());
    }

    #[test]
    fn product_states_have_zero_concurrence(
        ta in 0.0f64..3.2, pa in 0.0f64..6.3, tc in 0.0f64..3.2, pc in 0.0f64..6.3, mix in 0.0f64..1.0,
    ) {
        let ket = |t: f64, p: f64| Vector2::new(c((t / 2.0).cos(), 0.0), Complex::from_polar((t / 2.0).sin(), p));
        let a = ket(ta, pa);
        let b = ket(tc, pc);
        let ra = a * a.adjoint();
        let rc = (b * b.adjoint()).scale(mix) + Matrix2::identity().scale((1.0 - mix) / 2.0);
        let rho = DensityOperator::product(&ra, &rc).unwrap();
        prop_assert!(concurrence(&rho) < 1e-7);
    }

    #[test]
    fn timebin_round_trip_is_identity(seed in any::<u64>()) {
        let mut rng = substream(seed, 1);
        let rho = random_state(&mut rng, 2);
        let (out, p) = decode_timebin(&encode_timebin(&rho));
        prop_assert!((p - 0.5).abs() < 1e-12);
        prop_assert!(out.trace_distance(&rho) < 1e-9);
    }

    #[test]
    fn purity_bounds(seed in any::<u64>()) {
        let mut rng = substream(seed, 2);
        let rho = random_state(&mut rng, 1 + (seed % 4) as usize);
        let p = purity(&rho);
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&p));
    }
}

/// Dense-grid argmax of the SNR at 0.01 mW resolution.
fn grid_argmax(params: &ConversionParams<f64>, p_max: f64) -> f64 {
    let n = (p_max / 1e-5).round() as usize;
    (0..=n)
        .map(|i| i as f64 * 1e-5)
        .map(|p| (p, snr(&params.with_pump_power(p)).unwrap()))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

#[test]
fn optimizer_matches_dense_grid() {
    let mut rng = substream(77, 0);
    for case in 0..100 {
        let params = ConversionParams::new(
            rng.random_range(1.0..10.0),
            0.1,
            0.0,
            rng.random_range(1e4..3e5),
            rng.random_range(1.0..3000.0),
            1.0,
        )
        .unwrap();
        let p_max = 0.7;
        let opt = optimize_pump(&params, 0.0, p_max).unwrap();
        let grid = grid_argmax(&params, p_max);
        assert!(
            (opt.power - grid).abs() <= 0.2e-3,
            "case {case}: optimizer {} W vs grid {grid} W",
            opt.power
        );
    }
}

#[test]
fn mle_likelihood_monotone_on_random_tables() {
    let mut rng = substream(31, 0);
    for case in 0..50 {
        let table = exact_counts(&DensityOperator::maximally_mixed(), 1.0)
            .map_counts(|_| rng.random_range(0..200));
        let res = mle_reconstruct(&table, MleOptions::default()).unwrap();
        for w in res.trace.windows(2) {
            assert!(w[1] >= w[0], "case {case}: {} -> {}", w[0], w[1]);
        }
        assert!(DensityOperator::new(*res.rho.matrix()).is_ok(), "case {case}");
    }
}

#[test]
fn mle_recovers_random_states() {
    let mut rng = substream(8, 0);
    for case in 0..20 {
        let rho = random_state(&mut rng, 1 + case % 4);
        let res = mle_reconstruct(&exact_counts(&rho, 1e6), MleOptions::default()).unwrap();
        let d = res.rho.trace_distance(&rho);
        assert!(d < 5e-3, "case {case}: trace distance {d}");
    }
}

#[test]
fn linear_inversion_agrees_with_mle_at_high_counts() {
    let mut rng = substream(9, 0);
    for case in 0..10 {
        let rho = random_state(&mut rng, 4).mix_with_white_noise(0.2).unwrap();
        let table = poisson_counts(&rho, 1e6, case as u64);
        let lin = linear_inversion(&table).unwrap();
        assert!(lin.is_physical(), "case {case}");
        let mle = mle_reconstruct(&table, MleOptions::default()).unwrap();
        let d = lin.to_density().unwrap().trace_distance(&mle.rho);
        assert!(d < 2e-3, "case {case}: trace distance {d}");
    }
}

#[test]
fn jitter_fit_recovers_width() {
    let tdc = TdcConfig::new(100.0, 200.0, 0.0).unwrap();
    let mut rng = substream(4, 0);
    for case in 0..20 {
        let fwhm: f64 = rng.random_range(120.0..420.0);
        let det = DetectorSpec::new("d", 0.5, 0.0, fwhm / 2f64.sqrt()).unwrap();
        let hist = simulate_tdc(1e3, 20.0, &det, &det, &tdc, 100.0, case).unwrap();
        let fit: GaussianFit<f64> = fit_gaussian(&hist).unwrap();
        assert!((fit.fwhm - fwhm).abs() < 0.05 * fwhm, "case {case}: {} vs {fwhm}", fit.fwhm);
        assert!(fit.center.abs() < 50.0);
    }
}

#[test]
fn simulated_totals_are_poisson_consistent() {
    let cfg = calibrate(&CalibrationInputs::default()).unwrap().config(Scenario::ConvertedSs);
    let pred = predict_rates(&cfg).unwrap();
    let settings = tomography_settings();
    let duration = 100.0;
    let expect = (pred.signal_coincidence_rate + pred.noise_coincidence_rate) * duration * settings.len() as f64;
    let totals: Vec<f64> = (0..200)
        .map(|seed| run_tomography_counts(&cfg, &settings, duration, seed).unwrap().total() as f64)
        .collect();
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    let se = (expect / totals.len() as f64).sqrt();
    assert!((mean - expect).abs() < 3.0 * se, "mean {mean}, expected {expect} +- {se}");
}

#[test]
fn single_precision_matches_double() {
    let rho64 = DensityOperator::<f64>::werner(0.85).unwrap();
    let rho32: DensityOperator<f32> = rho64.cast();
    assert!((chsh_optimal(&rho32) as f64 - chsh_optimal(&rho64)).abs() < 1e-4);
    assert!((concurrence(&rho32) as f64 - concurrence(&rho64)).abs() < 1e-4);
    assert!((purity(&rho32) as f64 - purity(&rho64)).abs() < 1e-5);
}
