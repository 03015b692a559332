use std::path::{Path, PathBuf};

use qfconv_core::experiment::Scenario;
use qfconv_core::io::fmt_real;

use super::reconstruct::MetricsRecord;
use super::{create, write_text, Context};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Manifests written by `reconstruct`.
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    /// Exit with status 2 when any metrics file is missing or unreadable.
    #[arg(long)]
    strict: bool,
}

struct Row {
    label: String,
    metrics: Option<MetricsRecord>,
    problem: Option<String>,
}

fn load_row(path: &Path) -> Row {
    let manifest = match RunManifest::load(path) {
        Ok(m) => m,
        Err(e) => {
            return Row {
                label: path.display().to_string(),
                metrics: None,
                problem: Some(e.to_string()),
            }
        }
    };
    let label = manifest.label.clone().unwrap_or_else(|| path.display().to_string());
    let dir = path.parent().unwrap_or(Path::new("."));
    let Some(name) = manifest.outputs.iter().find(|o| o.starts_with("metrics_") && o.ends_with(".json")) else {
        return Row { label, metrics: None, problem: Some("manifest lists no metrics file".into()) };
    };
    let metrics_path = dir.join(name);
    let parsed = std::fs::read_to_string(&metrics_path)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str::<MetricsRecord>(&t).map_err(|e| e.to_string()));
    match parsed {
        Ok(m) => Row { label, metrics: Some(m), problem: None },
        Err(e) => Row {
            label,
            metrics: None,
            problem: Some(format!("{}: {e}", metrics_path.display())),
        },
    }
}

fn order(label: &str) -> usize {
    label.parse::<Scenario>().ok().and_then(|s| Scenario::ALL.iter().position(|&x| x == s)).unwrap_or(Scenario::ALL.len())
}

pub fn run(ctx: &Context, args: Args) -> CliResult<()> {
    let mut rows: Vec<Row> = args.manifests.iter().map(|p| load_row(p)).collect();
    rows.sort_by_key(|r| order(&r.label));

    let mut manifest = ctx.manifest("report");
    let csv_path = ctx.path("report.csv");
    {
        let io = |e: csv::Error| CliError::data(e.to_string());
        let mut w = csv::Writer::from_writer(create(&csv_path)?);
        w.write_record([
            "label", "fidelity", "fidelity_sigma", "eof", "eof_sigma", "purity", "purity_sigma", "s", "s_sigma",
            "s_fixed", "s_fixed_sigma", "status",
        ])
        .map_err(io)?;
        for r in &rows {
            let mut rec = vec![r.label.clone()];
            match &r.metrics {
                Some(m) => {
                    let x = &m.metrics;
                    for pair in [x.fidelity, x.eof, x.purity, x.s_optimal, x.s_parameter] {
                        rec.extend(pair.iter().map(|&v| fmt_real(v)));
                    }
                    rec.push("ok".into());
                }
                None => {
                    rec.extend(std::iter::repeat_n(String::new(), 10));
                    rec.push("absent".into());
                }
            }
            w.write_record(&rec).map_err(io)?;
        }
        w.flush()?;
    }
    manifest.record(&csv_path);

    let text = render_table(&rows);
    print!("{text}");
    let txt_path = ctx.path("report.txt");
    write_text(&txt_path, &text)?;
    manifest.record(&txt_path);
    manifest.finish(&ctx.out)?;

    let absent: Vec<&Row> = rows.iter().filter(|r| r.metrics.is_none()).collect();
    for r in &absent {
        eprintln!("warning: {} absent: {}", r.label, r.problem.as_deref().unwrap_or("unknown"));
    }
    if args.strict && !absent.is_empty() {
        return Err(CliError::data(format!("{} of {} metrics files absent", absent.len(), rows.len())));
    }
    Ok(())
}

fn render_table(rows: &[Row]) -> String {
    let cell = |p: [f64; 2]| format!("{:.3} +- {:.3}", p[0], p[1]);
    let header = ["state", "F", "EOF", "purity", "S"];
    let body: Vec<[String; 5]> = rows
        .iter()
        .map(|r| match &r.metrics {
            Some(m) => [
                r.label.clone(),
                cell(m.metrics.fidelity),
                cell(m.metrics.eof),
                cell(m.metrics.purity),
                cell(m.metrics.s_optimal),
            ],
            None => [r.label.clone(), "absent".into(), String::new(), String::new(), String::new()],
        })
        .collect();
    let widths: Vec<usize> = (0..5)
        .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for r in &body {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
