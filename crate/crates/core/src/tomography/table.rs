use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::io::fmt_real;
use crate::quantum::WaveplateSetting;
use crate::scalar::{lit, to_f64, Real};

/// Counts for outcomes (pass,pass), (pass,fail), (fail,pass), (fail,fail).
pub type OutcomeCounts = [u64; 4];

pub const COUNT_TABLE_COLUMNS: [&str; 10] = [
    "setting_index",
    "qwp_a_deg",
    "hwp_a_deg",
    "qwp_c_deg",
    "hwp_c_deg",
    "n_pp",
    "n_pf",
    "n_fp",
    "n_ff",
    "duration_s",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CountEntry<T: Real> {
    pub arm_a: WaveplateSetting<T>,
    pub arm_c: WaveplateSetting<T>,
    pub counts: OutcomeCounts,
    /// Seconds.
    pub duration: T,
}

impl<T: Real> CountEntry<T> {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Coincidence counts per analyzer-setting pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountTable<T: Real> {
    entries: Vec<CountEntry<T>>,
}

impl<T: Real> CountTable<T> {
    pub fn new(entries: Vec<CountEntry<T>>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[CountEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(CountEntry::total).sum()
    }

    /// Same settings and durations with every count replaced by `f(count)`.
    pub fn map_counts(&self, mut f: impl FnMut(u64) -> u64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| CountEntry {
                    counts: e.counts.map(&mut f),
                    ..e.clone()
                })
                .collect(),
        }
    }

    /// Outcome counts of a four-setting CHSH table, in setting order.
    pub fn chsh_counts(&self) -> Result<[OutcomeCounts; 4]> {
        if self.entries.len() != 4 {
            return Err(Error::Domain(format!(
                "CHSH table needs exactly 4 settings, found {}",
                self.entries.len()
            )));
        }
        Ok([0, 1, 2, 3].map(|i| self.entries[i].counts))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(COUNT_TABLE_COLUMNS)?;
        for (i, e) in self.entries.iter().enumerate() {
            let (qa, ha) = e.arm_a.degrees();
            let (qc, hc) = e.arm_c.degrees();
            let mut rec = vec![i.to_string()];
            rec.extend([qa, ha, qc, hc].iter().map(|&d| fmt_real(to_f64(d))));
            rec.extend(e.counts.iter().map(u64::to_string));
            rec.push(fmt_real(to_f64(e.duration)));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`write_csv`](Self::write_csv). Errors name
    /// the offending column or the 1-based file line.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header = rdr.headers()?.clone();
        for (i, want) in COUNT_TABLE_COLUMNS.iter().enumerate() {
            match header.get(i) {
                Some(got) if got == *want => {}
                Some(got) => {
                    return Err(Error::Schema(format!(
                        "column {} is '{got}', expected '{want}'",
                        i + 1
                    )))
                }
                None => return Err(Error::Schema(format!("missing column '{want}'"))),
            }
        }
        if header.len() > COUNT_TABLE_COLUMNS.len() {
            return Err(Error::Schema(format!(
                "unexpected extra column '{}'",
                &header[COUNT_TABLE_COLUMNS.len()]
            )));
        }

        let mut entries = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            let float = |k: usize| -> Result<f64> {
                rec[k].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("{}: '{}' is not a number", COUNT_TABLE_COLUMNS[k], &rec[k]),
                })
            };
            let count = |k: usize| -> Result<u64> {
                rec[k].parse::<u64>().map_err(|_| Error::Parse {
                    line,
                    message: format!(
                        "{}: '{}' is not a nonnegative integer",
                        COUNT_TABLE_COLUMNS[k], &rec[k]
                    ),
                })
            };
            let duration = float(9)?;
            if duration < 0.0 {
                return Err(Error::Parse {
                    line,
                    message: "duration_s is negative".into(),
                });
            }
            entries.push(CountEntry {
                arm_a: WaveplateSetting::from_degrees(lit(float(1)?), lit(float(2)?)),
                arm_c: WaveplateSetting::from_degrees(lit(float(3)?), lit(float(4)?)),
                counts: [count(5)?, count(6)?, count(7)?, count(8)?],
                duration: lit(duration),
            });
        }
        Ok(Self { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::tomography_settings;

    fn table() -> CountTable<f64> {
        CountTable::new(
            tomography_settings()
                .into_iter()
                .enumerate()
                .map(|(i, (a, c))| CountEntry {
                    arm_a: a,
                    arm_c: c,
                    counts: [i as u64, 2, 3, 4],
                    duration: 100.0,
                })
                .collect(),
        )
    }

    #[test]
    fn csv_round_trip() {
        let t = table();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "setting_index,qwp_a_deg,hwp_a_deg,qwp_c_deg,hwp_c_deg,n_pp,n_pf,n_fp,n_ff,duration_s\n"
        ));
        let back = CountTable::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 36);
        for (x, y) in back.entries().iter().zip(t.entries()) {
            assert_eq!(x.counts, y.counts);
            assert!((x.arm_a.hwp() - y.arm_a.hwp()).abs() < 1e-9);
            assert!((x.arm_c.qwp() - y.arm_c.qwp()).abs() < 1e-9);
        }
    }

    #[test]
    fn schema_errors_name_column() {
        let text = "setting_index,qwp_a_deg,hwp_a_deg,qwp_c_deg,hwp_c,n_pp,n_pf,n_fp,n_ff,duration_s\n";
        match CountTable::<f64>::read_csv(text.as_bytes()) {
            Err(Error::Schema(msg)) => assert!(msg.contains("hwp_c_deg"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let text = "setting_index,qwp_a_deg,hwp_a_deg\n";
        assert!(matches!(CountTable::<f64>::read_csv(text.as_bytes()), Err(Error::Schema(_))));
    }

    #[test]
    fn parse_errors_carry_line() {
        let text = "setting_index,qwp_a_deg,hwp_a_deg,qwp_c_deg,hwp_c_deg,n_pp,n_pf,n_fp,n_ff,duration_s\n\
                    0,0,0,0,0,1,2,3,4,10\n\
                    1,0,0,0,0,1,-2,3,4,10\n";
        match CountTable::<f64>::read_csv(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("n_pf"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
