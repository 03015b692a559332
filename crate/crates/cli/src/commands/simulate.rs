use qfconv_core::experiment::{predict_rates, run_tomography_counts, Scenario};
use qfconv_core::quantum::{fidelity_to_pure, StateVector};
use qfconv_core::tomography::tomography_settings;
use serde::Serialize;

use super::{create, Context};
use crate::error::{CliError, CliResult};
use crate::manifest::write_json;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// initial, converted-as or converted-ss.
    #[arg(long)]
    scenario: Option<String>,
    /// Total acquisition time in seconds, split over the 36 settings.
    #[arg(long)]
    duration: Option<f64>,
}

#[derive(Serialize)]
struct Rates {
    scenario: Scenario,
    signal_coincidence_hz: f64,
    noise_coincidence_hz: f64,
    noise_fraction: f64,
    expected_fidelity: f64,
    duration_per_setting_s: f64,
}

pub fn run(ctx: &Context, args: Args) -> CliResult<()> {
    let opts = &ctx.loaded.config.simulate;
    let scenario = match &args.scenario {
        Some(s) => s.parse::<Scenario>().map_err(|e| CliError::usage(e.to_string()))?,
        None => opts.scenario,
    };
    let duration = args.duration.unwrap_or(opts.duration_s);
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(CliError::usage(format!("duration must be finite and >= 0, got {duration}")));
    }
    if duration == 0.0 {
        eprintln!("warning: zero duration, the count table will be empty");
    }

    let cfg = ctx.loaded.calibration.config(scenario);
    let settings = tomography_settings();
    let per_setting = duration / settings.len() as f64;
    let table = run_tomography_counts(&cfg, &settings, per_setting, ctx.seed)?;
    let pred = predict_rates(&cfg)?;

    let mut manifest = ctx.manifest("simulate");
    manifest.label = Some(scenario.label().to_string());
    let csv_path = ctx.path(&format!("counts_{}.csv", scenario.label()));
    table.write_csv(create(&csv_path)?)?;
    manifest.record(&csv_path);
    let rates_path = ctx.path(&format!("rates_{}.json", scenario.label()));
    write_json(
        &rates_path,
        &Rates {
            scenario,
            signal_coincidence_hz: pred.signal_coincidence_rate,
            noise_coincidence_hz: pred.noise_coincidence_rate,
            noise_fraction: pred.noise_fraction(),
            expected_fidelity: fidelity_to_pure(&pred.effective_state, &StateVector::bell_phi_plus()),
            duration_per_setting_s: per_setting,
        },
    )?;
    manifest.record(&rates_path);
    manifest.finish(&ctx.out)?;
    println!(
        "{}: {} counts over {} settings written to {}",
        scenario.label(),
        table.total(),
        table.len(),
        csv_path.display()
    );
    Ok(())
}
