use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{pair_jitter_fwhm, DetectorSpec, TdcConfig};
use crate::error::{Error, Result};
use crate::io::fmt_real;
use crate::rng::{poisson, substream};
use crate::scalar::fwhm_per_sigma;

/// Histogram span around the window center, in units of the pair FWHM.
const SPAN_HALF_WIDTH_FWHM: f64 = 6.0;

/// Binned start-stop delays recorded by the TDC.
#[derive(Debug, Clone, PartialEq)]
pub struct TdcHistogram {
    /// Bin edges in ps, one more than the number of bins.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Seconds.
    pub acquisition_time: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct HistogramRow {
    bin_start_ps: String,
    bin_end_ps: String,
    counts: u64,
}

#[derive(Debug, Deserialize)]
struct HistogramRowIn {
    bin_start_ps: f64,
    bin_end_ps: f64,
    counts: u64,
}

impl TdcHistogram {
    pub fn new(edges: Vec<f64>, counts: Vec<u64>, acquisition_time: f64) -> Result<Self> {
        if edges.len() != counts.len() + 1 {
            return Err(Error::Validation(format!(
                "{} edges for {} bins",
                edges.len(),
                counts.len()
            )));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("bin edges must increase".into()));
        }
        Ok(Self {
            edges,
            counts,
            acquisition_time,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Writes `bin_start_ps,bin_end_ps,counts`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (i, &c) in self.counts.iter().enumerate() {
            out.serialize(HistogramRow {
                bin_start_ps: fmt_real(self.edges[i]),
                bin_end_ps: fmt_real(self.edges[i + 1]),
                counts: c,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the [`write_csv`](Self::write_csv) format. The acquisition time
    /// is not part of the file and must be supplied.
    pub fn read_csv<R: Read>(r: R, acquisition_time: f64) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut edges = Vec::new();
        let mut counts = Vec::new();
        for (i, row) in rdr.deserialize::<HistogramRowIn>().enumerate() {
            let row = row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })?;
            if let Some(&last) = edges.last() {
                if f64::abs(row.bin_start_ps - last) > 1e-6 {
                    return Err(Error::Parse {
                        line: i + 2,
                        message: "bins are not contiguous".into(),
                    });
                }
                edges.push(row.bin_end_ps);
            } else {
                edges.push(row.bin_start_ps);
                edges.push(row.bin_end_ps);
            }
            counts.push(row.counts);
        }
        Self::new(edges, counts, acquisition_time)
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Simulates a coincidence-delay histogram: a Gaussian peak of total area
/// `signal_rate * duration` and width [`pair_jitter_fwhm`] centered on the
/// window center, on a flat background of `noise_rate * duration` counts
/// spread over the histogram span (+-6 pair FWHM). Bin contents are Poisson.
pub fn simulate_tdc(
    signal_rate: f64,
    noise_rate: f64,
    d1: &DetectorSpec<f64>,
    d2: &DetectorSpec<f64>,
    cfg: &TdcConfig<f64>,
    duration: f64,
    seed: u64,
) -> Result<TdcHistogram> {
    if !(signal_rate >= 0.0 && noise_rate >= 0.0) {
        return Err(Error::Domain("rates must be nonnegative".into()));
    }
    if !(duration > 0.0) {
        return Err(Error::Domain(format!("duration must be positive, got {duration}")));
    }
    d1.validate()?;
    d2.validate()?;
    cfg.validate()?;

    let fwhm = pair_jitter_fwhm(d1, d2);
    let sigma = fwhm / fwhm_per_sigma::<f64>();
    let n_bins = ((2.0 * SPAN_HALF_WIDTH_FWHM * fwhm) / cfg.bin_width).ceil().max(1.0) as usize;
    let span = n_bins as f64 * cfg.bin_width;
    let start = cfg.window_center - 0.5 * span;
    let edges: Vec<f64> = (0..=n_bins).map(|i| start + i as f64 * cfg.bin_width).collect();

    let signal = signal_rate * duration;
    let background_per_bin = noise_rate * duration * cfg.bin_width / span;
    let mut rng = substream(seed, 0);
    let counts = edges
        .windows(2)
        .map(|w| {
            let mass = normal_cdf((w[1] - cfg.window_center) / sigma)
                - normal_cdf((w[0] - cfg.window_center) / sigma);
            poisson(&mut rng, signal * mass + background_per_bin)
        })
        .collect();
    TdcHistogram::new(edges, counts, duration)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sspd() -> DetectorSpec<f64> {
        DetectorSpec::new("sspd", 0.3, 100.0, 150.0 / 2f64.sqrt()).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = TdcConfig::new(100.0, 200.0, 0.0).unwrap();
        let a = simulate_tdc(100.0, 10.0, &sspd(), &sspd(), &cfg, 100.0, 3).unwrap();
        let b = simulate_tdc(100.0, 10.0, &sspd(), &sspd(), &cfg, 100.0, 3).unwrap();
        let c = simulate_tdc(100.0, 10.0, &sspd(), &sspd(), &cfg, 100.0, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.counts, c.counts);
        assert_eq!(a.bins(), 18);
        assert_eq!(a.edges[0], -900.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = TdcConfig::new(100.0, 200.0, 0.0).unwrap();
        assert!(simulate_tdc(-1.0, 0.0, &sspd(), &sspd(), &cfg, 1.0, 0).is_err());
        assert!(simulate_tdc(1.0, 0.0, &sspd(), &sspd(), &cfg, 0.0, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let cfg = TdcConfig::new(100.0, 200.0, 50.0).unwrap();
        let h = simulate_tdc(50.0, 5.0, &sspd(), &sspd(), &cfg, 10.0, 9).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("bin_start_ps,bin_end_ps,counts\n"));
        let back = TdcHistogram::read_csv(buf.as_slice(), 10.0).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn csv_errors_carry_line() {
        let text = "bin_start_ps,bin_end_ps,counts\n0,100,3\n100,200,x\n";
        match TdcHistogram::read_csv(text.as_bytes(), 1.0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
