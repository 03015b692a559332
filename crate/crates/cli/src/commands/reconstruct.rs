use std::fs::File;
use std::path::PathBuf;

use qfconv_core::tomography::{bootstrap_metrics, linear_inversion, CountTable, MetricsReport, MleOptions};
use serde::{Deserialize, Serialize};

use super::{write_text, Context};
use crate::error::{CliError, CliResult};
use crate::manifest::write_json;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Count table CSV written by `simulate`.
    counts: PathBuf,
    /// Bootstrap resamples; overrides the configuration.
    #[arg(long)]
    resamples: Option<usize>,
    /// Dataset label; defaults to the file stem without a `counts_` prefix.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MleSummary {
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub regularized: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LinearSummary {
    pub min_eigenvalue: f64,
    pub physical: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub label: String,
    pub total_counts: u64,
    pub bootstrap_resamples: usize,
    pub metrics: MetricsReportRecord,
    pub mle: MleSummary,
    pub linear_inversion: Option<LinearSummary>,
}

/// Serialized form of [`MetricsReport`] as `[value, sigma]` pairs.
#[derive(Debug, Serialize, Deserialize)]
pub struct MetricsReportRecord {
    pub fidelity: [f64; 2],
    pub eof: [f64; 2],
    pub purity: [f64; 2],
    pub s_parameter: [f64; 2],
    pub s_optimal: [f64; 2],
}

impl From<&MetricsReport<f64>> for MetricsReportRecord {
    fn from(m: &MetricsReport<f64>) -> Self {
        Self {
            fidelity: [m.fidelity.value, m.fidelity.sigma],
            eof: [m.eof.value, m.eof.sigma],
            purity: [m.purity.value, m.purity.sigma],
            s_parameter: [m.s_parameter.value, m.s_parameter.sigma],
            s_optimal: [m.s_optimal.value, m.s_optimal.sigma],
        }
    }
}

pub fn run(ctx: &Context, args: Args) -> CliResult<()> {
    let opts = &ctx.loaded.config.reconstruct;
    let resamples = args.resamples.unwrap_or(opts.bootstrap_resamples);
    let label = args.label.clone().unwrap_or_else(|| {
        let stem = args.counts.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        stem.strip_prefix("counts_").unwrap_or(&stem).to_string()
    });
    if label.is_empty() || label.contains(['/', '\\']) {
        return Err(CliError::usage(format!("invalid label '{label}'")));
    }

    let file = File::open(&args.counts)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.counts.display())))?;
    let table = CountTable::<f64>::read_csv(file).map_err(|e| CliError::from(e).context(args.counts.display()))?;
    let mle_opts = MleOptions { tol: opts.mle_tol, max_iter: opts.mle_max_iter };
    let (point, report) = bootstrap_metrics(&table, resamples, ctx.seed, mle_opts)?;
    if !point.converged {
        eprintln!("warning: MLE stopped after {} iterations without converging", point.iterations);
    }
    if point.regularized {
        eprintln!("warning: probability floor applied during MLE");
    }
    let linear = linear_inversion(&table).ok().map(|l| LinearSummary {
        min_eigenvalue: l.min_eigenvalue,
        physical: l.is_physical(),
    });

    let mut manifest = ctx.manifest("reconstruct");
    manifest.label = Some(label.clone());
    let metrics_path = ctx.path(&format!("metrics_{label}.json"));
    write_json(
        &metrics_path,
        &MetricsRecord {
            label: label.clone(),
            total_counts: table.total(),
            bootstrap_resamples: resamples,
            metrics: (&report).into(),
            mle: MleSummary {
                log_likelihood: point.log_likelihood,
                iterations: point.iterations,
                converged: point.converged,
                regularized: point.regularized,
            },
            linear_inversion: linear,
        },
    )?;
    manifest.record(&metrics_path);
    let rho_path = ctx.path(&format!("rho_{label}.txt"));
    write_text(&rho_path, &point.rho.to_text())?;
    manifest.record(&rho_path);
    manifest.finish(&ctx.out)?;

    println!("{label} ({} counts, {resamples} bootstrap resamples)", table.total());
    for (name, e) in [
        ("fidelity", report.fidelity),
        ("EOF", report.eof),
        ("purity", report.purity),
        ("S (fixed)", report.s_parameter),
        ("S (optimal)", report.s_optimal),
    ] {
        println!("  {name:<12} {:.4} +- {:.4}", e.value, e.sigma);
    }
    Ok(())
}
