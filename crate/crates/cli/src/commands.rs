//! The four subcommands, as library functions returning their artifacts.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use wavepart_core::witness::tmsv_q_for_mean_total;
use wavepart_core::{
    analytic_coherent, analytic_fock, analytic_tmsv, analyze_clicks, analyze_counts,
    detected_statistics, photon_moments, sample_classical_particles, sample_classical_waves,
    sample_quantum_shots, tmsv_inputs, witness_pair, AnalysisReport, ClassicalEnsemble, Complex64,
    ModePreparation,
};

use crate::config::{ConfigFile, Source};
use crate::histfile::{Counts, HistogramFile};
use crate::{read_file, CliError};

pub const THEORY_FORMAT: &str = "wpd-theory-v1";
pub const SWEEP_FORMAT: &str = "wpd-sweep-v1";

/// Truncation used by `theory --via pipeline`; tight enough that the
/// pipeline agrees with the closed forms to about 1e-13.
pub const THEORY_TAU: f64 = 1e-14;

/// Input state for `theory`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TheoryState {
    Vacuum,
    Coherent {
        alpha: Complex64,
        beta: Complex64,
    },
    Fock {
        m: u64,
        n: u64,
    },
    /// Lossless squeezing parameter `q = tanh^2 r`.
    Tmsv {
        q: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Analytic,
    Pipeline,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryOutput {
    pub format: &'static str,
    pub state: String,
    pub via: &'static str,
    pub theta: f64,
    pub eta: f64,
    pub e_wave: f64,
    pub e_part: f64,
    pub mean_total: f64,
}

fn state_name(s: &TheoryState) -> String {
    match s {
        TheoryState::Vacuum => "vacuum".into(),
        TheoryState::Coherent { alpha, beta } => format!(
            "coherent(alpha={}{:+}i, beta={}{:+}i)",
            alpha.re, alpha.im, beta.re, beta.im
        ),
        TheoryState::Fock { m, n } => format!("fock(m={m}, n={n})"),
        TheoryState::Tmsv { q } => format!("tmsv(q={q})"),
    }
}

fn check_eta(eta: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(CliError::Input(format!("eta must lie in [0,1], got {eta}")))
    }
}

/// Closed-form witnesses, or the same numbers recomputed through the Fock
/// pipeline. Squeezed inputs always interfere at `theta = 0`.
pub fn theory(
    state: TheoryState,
    theta: f64,
    eta: f64,
    via: Via,
) -> Result<TheoryOutput, CliError> {
    check_eta(eta)?;
    if !theta.is_finite() {
        return Err(CliError::Input("theta must be finite".into()));
    }
    let theta = if matches!(state, TheoryState::Tmsv { .. }) {
        0.0
    } else {
        theta
    };
    let (e_wave, e_part, mean_total) = match via {
        Via::Analytic => match state {
            TheoryState::Vacuum => (0.0, 0.0, 0.0),
            TheoryState::Coherent { alpha, beta } => {
                let (w, p) = analytic_coherent(alpha, beta, theta, eta);
                (w, p, eta * (alpha.norm_sqr() + beta.norm_sqr()))
            }
            TheoryState::Fock { m, n } => {
                let (w, p) = analytic_fock(m, n, eta);
                (w, p, eta * (m + n) as f64)
            }
            TheoryState::Tmsv { q } => {
                let t = analytic_tmsv(q, eta)?;
                (t.e_wave, t.e_part, t.mean_total)
            }
        },
        Via::Pipeline => {
            let (a, b) = match state {
                TheoryState::Vacuum => (ModePreparation::Vacuum, ModePreparation::Vacuum),
                TheoryState::Coherent { alpha, beta } => (
                    ModePreparation::coherent(alpha),
                    ModePreparation::coherent(beta),
                ),
                TheoryState::Fock { m, n } => (
                    ModePreparation::Fock { n: m as usize },
                    ModePreparation::Fock { n: n as usize },
                ),
                TheoryState::Tmsv { q } => tmsv_inputs(q)?,
            };
            let dist = detected_statistics(a, b, theta, eta, THEORY_TAU)?;
            let m = photon_moments(&dist);
            let w = witness_pair(&m);
            (w.e_wave, w.e_part, m.mean_total())
        }
    };
    Ok(TheoryOutput {
        format: THEORY_FORMAT,
        state: state_name(&state),
        via: match via {
            Via::Analytic => "analytic",
            Via::Pipeline => "pipeline",
        },
        theta,
        eta,
        e_wave,
        e_part,
        mean_total,
    })
}

/// Runs the experiment described by `cfg` and returns the histogram file.
pub fn simulate(cfg: &ConfigFile) -> Result<HistogramFile, CliError> {
    let run = cfg.run_config();
    let (counts, tail_mass) = match cfg.source()? {
        Source::Quantum(a, b) => {
            let dist = detected_statistics(a, b, run.theta, run.eta, cfg.analysis.tau)?;
            let h = sample_quantum_shots(&dist, &run)?;
            (Counts::Clicks(h), dist.tail_mass())
        }
        Source::Classical(ens) => {
            let h = match ens {
                ClassicalEnsemble::Particle(_) => sample_classical_particles(&ens, &run)?,
                _ => sample_classical_waves(&ens, &run)?,
            };
            (Counts::Ideal(h), 0.0)
        }
    };
    Ok(HistogramFile {
        counts,
        tail_mass,
        input: cfg.input_description(),
        config: cfg.to_toml().lines().map(str::to_string).collect(),
    })
}

/// `simulate` from a config file path.
pub fn simulate_path(path: &Path) -> Result<HistogramFile, CliError> {
    let cfg = ConfigFile::parse(&read_file(path)?)?;
    simulate(&cfg)
}

/// Analyzes a histogram; refuses files whose truncation tail exceeds `tau`.
pub fn analyze(file: &HistogramFile, tau: f64) -> Result<AnalysisReport, CliError> {
    if !(tau > 0.0) {
        return Err(CliError::Input("tau must be > 0".into()));
    }
    if file.tail_mass > tau {
        return Err(CliError::Input(format!(
            "histogram was simulated with truncation tail {:e} > tau = {tau:e}",
            file.tail_mass
        )));
    }
    let report = match &file.counts {
        Counts::Clicks(h) => analyze_clicks(h, &file.input)?,
        Counts::Ideal(h) => analyze_counts(h, &file.input)?,
    };
    Ok(report)
}

/// Parameter family for `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `alpha = beta` real, `theta = 0`.
    Coherent,
    /// `m = n`, integer grid.
    Fock,
    /// Squeezing parameter `q`.
    TmsvQ,
    /// Detected total mean photon number.
    TmsvMeanTotal,
}

impl Family {
    fn column(&self) -> &'static str {
        match self {
            Family::Coherent => "alpha",
            Family::Fock => "n",
            Family::TmsvQ => "q",
            Family::TmsvMeanTotal => "mean_total",
        }
    }
}

fn grid(family: Family, from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Input(format!("invalid range: {msg}"));
    if !(from.is_finite() && to.is_finite()) || from > to {
        return Err(bad(format!("need finite from <= to, got {from}..{to}")));
    }
    if family == Family::Fock {
        if from < 0.0 || from.fract() != 0.0 || to.fract() != 0.0 {
            return Err(bad("fock sweeps need non-negative integer bounds".into()));
        }
        return Ok((from as u64..=to as u64).map(|n| n as f64).collect());
    }
    if steps < 2 && from != to {
        return Err(bad("steps must be >= 2".into()));
    }
    if steps == 0 {
        return Err(bad("steps must be >= 1".into()));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + h * i as f64
            }
        })
        .collect())
}

/// Closed-form theory along a one-parameter family, as CSV.
pub fn sweep(
    family: Family,
    from: f64,
    to: f64,
    steps: usize,
    eta: f64,
) -> Result<String, CliError> {
    check_eta(eta)?;
    let mut out = String::new();
    let _ = writeln!(out, "# format={SWEEP_FORMAT}");
    let _ = writeln!(out, "# family={}", family.column());
    let _ = writeln!(out, "# eta={eta:.16e}");
    out.push_str("parameter,e_wave,e_part,mean_total\n");
    for x in grid(family, from, to, steps)? {
        let state = match family {
            Family::Coherent => {
                let a = Complex64::new(x, 0.0);
                TheoryState::Coherent { alpha: a, beta: a }
            }
            Family::Fock => TheoryState::Fock {
                m: x as u64,
                n: x as u64,
            },
            Family::TmsvQ => TheoryState::Tmsv { q: x },
            Family::TmsvMeanTotal => TheoryState::Tmsv {
                q: tmsv_q_for_mean_total(x, eta)?,
            },
        };
        let t = theory(state, 0.0, eta, Via::Analytic)?;
        let _ = writeln!(
            out,
            "{x:.16e},{:.16e},{:.16e},{:.16e}",
            t.e_wave, t.e_part, t.mean_total
        );
    }
    Ok(out)
}
