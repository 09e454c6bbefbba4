//! Histogram files: a commented header block followed by CSV rows for the
//! nonzero cells.
//!
//! ```text
//! # format=wpd-hist-v1
//! # detector=clicks
//! # d_bins=8
//! # shots=1000
//! # seed=7
//! # tail_mass=0.0000000000000000e0
//! # input={"kind":"tmsv","q":0.5,"mean_total":null}
//! # config: [input]
//! # config: ...
//! k_a,k_b,count
//! 0,0,990
//! 1,1,10
//! ```
//!
//! Classical runs use `detector=ideal`, no `d_bins` line and an `m,n,count`
//! column header.

use std::fmt::Write as _;

use wavepart_core::{ClickHistogram, CountHistogram};

use crate::CliError;

pub const HIST_FORMAT: &str = "wpd-hist-v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Counts {
    Clicks(ClickHistogram),
    Ideal(CountHistogram),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramFile {
    pub counts: Counts,
    pub tail_mass: f64,
    pub input: String,
    pub config: Vec<String>,
}

impl HistogramFile {
    pub fn shots(&self) -> u64 {
        match &self.counts {
            Counts::Clicks(h) => h.total_shots(),
            Counts::Ideal(h) => h.shots,
        }
    }

    pub fn seed(&self) -> u64 {
        match &self.counts {
            Counts::Clicks(h) => h.seed(),
            Counts::Ideal(h) => h.seed,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# format={HIST_FORMAT}");
        match &self.counts {
            Counts::Clicks(h) => {
                let _ = writeln!(out, "# detector=clicks");
                let _ = writeln!(
                    out,
                    "# d_bins={}",
                    wavepart_core::detector::ClickStatistics::d_bins(h)
                );
            }
            Counts::Ideal(_) => {
                let _ = writeln!(out, "# detector=ideal");
            }
        }
        let _ = writeln!(out, "# shots={}", self.shots());
        let _ = writeln!(out, "# seed={}", self.seed());
        let _ = writeln!(out, "# tail_mass={:.16e}", self.tail_mass);
        let _ = writeln!(out, "# input={}", self.input);
        for line in &self.config {
            let _ = writeln!(out, "# config: {line}");
        }
        match &self.counts {
            Counts::Clicks(h) => {
                out.push_str("k_a,k_b,count\n");
                for (a, b, c) in h.nonzero() {
                    let _ = writeln!(out, "{a},{b},{c}");
                }
            }
            Counts::Ideal(h) => {
                out.push_str("m,n,count\n");
                for (&(m, n), &c) in &h.counts {
                    let _ = writeln!(out, "{m},{n},{c}");
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::Input(format!("histogram: {msg}"));
        let mut format = None;
        let mut detector = None;
        let mut d_bins = None;
        let mut shots = None;
        let mut seed = None;
        let mut tail_mass = 0.0;
        let mut input = String::new();
        let mut config = Vec::new();
        let mut rows = Vec::new();
        let mut saw_columns = false;

        for (lineno, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.strip_prefix(' ').unwrap_or(rest);
                if let Some(cfg) = rest.strip_prefix("config: ") {
                    config.push(cfg.to_string());
                    continue;
                }
                if rest == "config:" {
                    config.push(String::new());
                    continue;
                }
                let Some((key, value)) = rest.split_once('=') else {
                    continue;
                };
                let parse_u64 = |v: &str| {
                    v.parse::<u64>()
                        .map_err(|_| bad(format!("line {}: bad integer `{v}`", lineno + 1)))
                };
                match key {
                    "format" => format = Some(value.to_string()),
                    "detector" => detector = Some(value.to_string()),
                    "d_bins" => d_bins = Some(parse_u64(value)? as usize),
                    "shots" => shots = Some(parse_u64(value)?),
                    "seed" => seed = Some(parse_u64(value)?),
                    "tail_mass" => {
                        tail_mass = value
                            .parse()
                            .map_err(|_| bad(format!("bad tail mass `{value}`")))?
                    }
                    "input" => input = value.to_string(),
                    _ => {}
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !saw_columns {
                saw_columns = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(format!("line {}: expected 3 columns", lineno + 1)));
            }
            let mut vals = [0u64; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f
                    .parse()
                    .map_err(|_| bad(format!("line {}: bad integer `{f}`", lineno + 1)))?;
            }
            rows.push(vals);
        }

        if format.as_deref() != Some(HIST_FORMAT) {
            return Err(bad(format!("unsupported format {format:?}")));
        }
        let shots = shots.ok_or_else(|| bad("missing shots".into()))?;
        let seed = seed.ok_or_else(|| bad("missing seed".into()))?;
        let counts = match detector.as_deref() {
            Some("clicks") => {
                let d = d_bins.ok_or_else(|| bad("missing d_bins".into()))?;
                let h = ClickHistogram::from_cells(
                    d,
                    seed,
                    rows.iter().map(|r| (r[0] as usize, r[1] as usize, r[2])),
                )?;
                Counts::Clicks(h)
            }
            Some("ideal") => {
                let mut h = CountHistogram::new(seed);
                for r in &rows {
                    h.add(r[0], r[1], r[2]);
                }
                Counts::Ideal(h)
            }
            other => return Err(bad(format!("unknown detector {other:?}"))),
        };
        let file = HistogramFile {
            counts,
            tail_mass,
            input,
            config,
        };
        if file.shots() != shots {
            return Err(bad(format!(
                "counts sum to {} but header says {shots} shots",
                file.shots()
            )));
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn click_file_round_trip() {
        let h = ClickHistogram::from_cells(8, 42, [(0, 0, 90), (1, 0, 6), (2, 1, 4)]).unwrap();
        let f = HistogramFile {
            counts: Counts::Clicks(h),
            tail_mass: 1.5e-13,
            input: "{\"kind\":\"tmsv\"}".into(),
            config: vec!["[run]".into(), "shots = 100".into()],
        };
        let text = f.render();
        assert!(text.starts_with("# format=wpd-hist-v1\n# detector=clicks\n# d_bins=8\n"));
        assert!(text.contains("\nk_a,k_b,count\n0,0,90\n1,0,6\n2,1,4\n"));
        assert_eq!(HistogramFile::parse(&text).unwrap(), f);
    }

    #[test]
    fn ideal_file_round_trip() {
        let mut h = CountHistogram::new(5);
        h.add(0, 0, 3);
        h.add(12, 1, 2);
        let f = HistogramFile {
            counts: Counts::Ideal(h),
            tail_mass: 0.0,
            input: String::new(),
            config: vec![],
        };
        assert_eq!(HistogramFile::parse(&f.render()).unwrap(), f);
    }

    #[test]
    fn malformed_files() {
        let ok = "# format=wpd-hist-v1\n# detector=clicks\n# d_bins=8\n# shots=3\n# seed=1\nk_a,k_b,count\n0,0,3\n";
        assert!(HistogramFile::parse(ok).is_ok());
        for text in [
            ok.replace("wpd-hist-v1", "wpd-hist-v0"),
            ok.replace("# shots=3", "# shots=4"),
            ok.replace("0,0,3", "0,0"),
            ok.replace("0,0,3", "9,0,3"),
            ok.replace("0,0,3", "0,x,3"),
            ok.replace("# seed=1\n", ""),
            ok.replace("clicks", "photons"),
        ] {
            assert!(HistogramFile::parse(&text).is_err(), "{text}");
        }
    }
}
