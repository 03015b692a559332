use qfconv_core::conversion::{optimize_pump, sweep, ConversionParams};
use qfconv_core::io::fmt_real;
use qfconv_core::experiment::Scenario;
use serde::Serialize;

use super::{create, write_text, Context};
use crate::error::{CliError, CliResult};
use crate::manifest::write_json;
use crate::svg::{Plot, Series};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Lowest pump power, mW.
    #[arg(long)]
    p_min: Option<f64>,
    /// Highest pump power, mW.
    #[arg(long)]
    p_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Serialize)]
struct Optimum {
    power_mw: f64,
    snr: f64,
    efficiency: f64,
}

pub fn run(ctx: &Context, args: Args) -> CliResult<()> {
    let opts = &ctx.loaded.config.sweep;
    let p_min = args.p_min.unwrap_or(opts.p_min_mw);
    let p_max = args.p_max.unwrap_or(opts.p_max_mw);
    let steps = args.steps.unwrap_or(opts.steps);
    if !(p_min >= 0.0 && p_max >= p_min && p_max.is_finite()) || steps == 0 {
        return Err(CliError::usage(format!(
            "invalid sweep range [{p_min}, {p_max}] mW with {steps} steps"
        )));
    }
    let params: ConversionParams<f64> = ctx
        .loaded
        .calibration
        .config(Scenario::ConvertedSs)
        .conversion
        .expect("converted scenario has conversion parameters");

    let mut manifest = ctx.manifest("sweep-pump");
    let rows = sweep(&params, p_min * 1e-3, p_max * 1e-3, steps)?;
    let csv_path = ctx.path("sweep.csv");
    {
        let mut w = csv::Writer::from_writer(create(&csv_path)?);
        let io = |e: csv::Error| CliError::data(e.to_string());
        w.write_record(["P_mW", "efficiency", "noise_Hz", "snr"]).map_err(io)?;
        for r in &rows {
            w.write_record([
                fmt_real(r.power * 1e3),
                fmt_real(r.efficiency),
                fmt_real(r.noise),
                r.snr.map(fmt_real).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
    }
    manifest.record(&csv_path);

    let optimum = if steps > 1 && p_max > p_min {
        let opt = optimize_pump(&params, p_min * 1e-3, p_max * 1e-3)?;
        let rec = Optimum {
            power_mw: opt.power * 1e3,
            snr: opt.snr,
            efficiency: qfconv_core::conversion::efficiency(&params.with_pump_power(opt.power)),
        };
        println!("optimum pump power: {:.3} mW (snr {:.4})", rec.power_mw, rec.snr);
        let path = ctx.path("optimum.json");
        write_json(&path, &rec)?;
        manifest.record(&path);
        Some(rec)
    } else {
        None
    };
    println!("wrote {} rows to {}", rows.len(), csv_path.display());

    if ctx.svg {
        let xs: Vec<f64> = rows.iter().map(|r| r.power * 1e3).collect();
        let eff: Vec<f64> = rows.iter().map(|r| r.efficiency).collect();
        let noise: Vec<f64> = rows.iter().map(|r| r.noise).collect();
        let plot = Plot {
            title: "Conversion efficiency and background vs pump power",
            x_label: "pump power (mW)",
            y_label: "conversion efficiency",
            y2_label: Some("background rate (Hz)"),
            series: vec![
                Series { xs: &xs, ys: &eff, color: "#1f4e99", points: false, right_axis: false },
                Series { xs: &xs, ys: &noise, color: "#c0392b", points: false, right_axis: true },
            ],
            markers: optimum
                .iter()
                .map(|o| (o.power_mw, format!("SNR max {:.1} mW", o.power_mw)))
                .collect(),
        };
        let path = ctx.path("sweep.svg");
        write_text(&path, &plot.render())?;
        manifest.record(&path);
    }
    manifest.finish(&ctx.out)?;
    Ok(())
}
