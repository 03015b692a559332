use qfconv_core::detection::{fit_gaussian, pair_jitter_fwhm, simulate_tdc, window_acceptance, DetectorSpec, GaussianFit, TdcHistogram};
use qfconv_core::experiment::Calibration;
use serde::Serialize;

use super::{create, write_text, Context};
use crate::error::{CliError, CliResult};
use crate::manifest::write_json;
use crate::svg::{Plot, Series};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Detector pair as `LABEL+LABEL` (Si-APD, InGaAs-APD, SSPD-780,
    /// SSPD-1522). Default: the three standard pairings.
    #[arg(long)]
    pairing: Option<String>,
    /// Print and record the window-acceptance ratio of the best and worst
    /// fitted pairings.
    #[arg(long)]
    window_report: bool,
}

#[derive(Serialize)]
struct FitRecord<'a> {
    visible: &'a str,
    telecom: &'a str,
    model_fwhm_ps: f64,
    fit: GaussianFit<f64>,
    window_acceptance: f64,
}

#[derive(Serialize)]
struct WindowReport {
    window_ps: f64,
    best: String,
    best_fwhm_ps: f64,
    worst: String,
    worst_fwhm_ps: f64,
    acceptance_ratio: f64,
}

fn detectors(cal: &Calibration) -> Vec<DetectorSpec<f64>> {
    vec![cal.si_apd(), cal.ingaas_apd(), cal.sspd_visible(), cal.sspd_telecom()]
}

fn parse_pairing(cal: &Calibration, text: &str) -> CliResult<(DetectorSpec<f64>, DetectorSpec<f64>)> {
    let all = detectors(cal);
    let find = |label: &str| {
        all.iter().find(|d| d.label.eq_ignore_ascii_case(label.trim())).cloned().ok_or_else(|| {
            let known: Vec<&str> = all.iter().map(|d| d.label.as_str()).collect();
            CliError::usage(format!("unknown detector '{label}' (known: {})", known.join(", ")))
        })
    };
    let (a, b) = text
        .split_once('+')
        .ok_or_else(|| CliError::usage(format!("pairing '{text}' must look like LABEL+LABEL")))?;
    Ok((find(a)?, find(b)?))
}

pub fn run(ctx: &Context, args: Args) -> CliResult<()> {
    let cal = &ctx.loaded.calibration;
    let opts = &ctx.loaded.config.jitter;
    let pairings = match &args.pairing {
        Some(p) => vec![parse_pairing(cal, p)?],
        None => cal.jitter_pairings().to_vec(),
    };
    let tdc = ctx.loaded.calibration.config(qfconv_core::experiment::Scenario::ConvertedSs).tdc;

    let mut manifest = ctx.manifest("jitter-hist");
    let mut fitted = Vec::new();
    for (k, (d1, d2)) in pairings.iter().enumerate() {
        let slug = format!("{}_{}", d1.label, d2.label).to_ascii_lowercase();
        let hist = simulate_tdc(
            opts.events / opts.acquisition_s,
            opts.background_events / opts.acquisition_s,
            d1,
            d2,
            &tdc,
            opts.acquisition_s,
            ctx.seed.wrapping_add(k as u64),
        )?;
        let fit: GaussianFit<f64> = fit_gaussian(&hist).map_err(|e| CliError::from(e).context(&slug))?;
        let acc = window_acceptance(fit.fwhm, tdc.window_width);
        println!(
            "{} + {}: fitted FWHM {:.1} ps (model {:.1} ps), window acceptance {:.4}",
            d1.label,
            d2.label,
            fit.fwhm,
            pair_jitter_fwhm(d1, d2),
            acc
        );

        let csv_path = ctx.path(&format!("jitter_{slug}.csv"));
        hist.write_csv(create(&csv_path)?)?;
        manifest.record(&csv_path);
        let fit_path = ctx.path(&format!("jitter_{slug}_fit.json"));
        write_json(
            &fit_path,
            &FitRecord {
                visible: &d1.label,
                telecom: &d2.label,
                model_fwhm_ps: pair_jitter_fwhm(d1, d2),
                fit,
                window_acceptance: acc,
            },
        )?;
        manifest.record(&fit_path);
        if ctx.svg {
            let path = ctx.path(&format!("jitter_{slug}.svg"));
            write_text(&path, &histogram_plot(&hist, &fit, &format!("{} + {}", d1.label, d2.label)))?;
            manifest.record(&path);
        }
        fitted.push((format!("{}+{}", d1.label, d2.label), fit.fwhm));
    }

    if args.window_report {
        let best = fitted.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("at least one pairing");
        let worst = fitted.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("at least one pairing");
        let ratio = window_acceptance(best.1, tdc.window_width) / window_acceptance(worst.1, tdc.window_width);
        println!(
            "window acceptance ratio {} / {} in {} ps: {:.3}",
            best.0, worst.0, tdc.window_width, ratio
        );
        let path = ctx.path("window_report.json");
        write_json(
            &path,
            &WindowReport {
                window_ps: tdc.window_width,
                best: best.0.clone(),
                best_fwhm_ps: best.1,
                worst: worst.0.clone(),
                worst_fwhm_ps: worst.1,
                acceptance_ratio: ratio,
            },
        )?;
        manifest.record(&path);
    }
    manifest.finish(&ctx.out)?;
    Ok(())
}

fn histogram_plot(hist: &TdcHistogram, fit: &GaussianFit<f64>, title: &str) -> String {
    let xs: Vec<f64> = (0..hist.bins()).map(|i| hist.bin_center(i)).collect();
    let ys: Vec<f64> = hist.counts.iter().map(|&c| c as f64).collect();
    let (lo, hi) = (hist.edges[0], hist.edges[hist.bins()]);
    let sigma = fit.fwhm / (8.0 * std::f64::consts::LN_2).sqrt();
    let width = hist.edges[1] - hist.edges[0];
    let fx: Vec<f64> = (0..=400).map(|i| lo + (hi - lo) * i as f64 / 400.0).collect();
    let fy: Vec<f64> = fx
        .iter()
        .map(|&x| {
            let z = (x - fit.center) / sigma;
            fit.background + fit.amplitude * width * (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        })
        .collect();
    Plot {
        title,
        x_label: "delay (ps)",
        y_label: "counts per bin",
        y2_label: None,
        series: vec![
            Series { xs: &xs, ys: &ys, color: "#1f4e99", points: true, right_axis: false },
            Series { xs: &fx, ys: &fy, color: "#c0392b", points: false, right_axis: false },
        ],
        markers: vec![(fit.center, format!("FWHM {:.0} ps", fit.fwhm))],
    }
    .render()
}
