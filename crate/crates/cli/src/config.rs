//! Experiment configuration files (TOML).
//!
//! ```toml
//! [input]
//! kind = "tmsv"
//! mean_total = 0.02
//!
//! [loss]
//! eta = 0.024
//!
//! [run]
//! shots = 10000000
//! seed = 7
//! ```

use serde::{Deserialize, Serialize};
use wavepart_core::fock::DEFAULT_TAU;
use wavepart_core::samplers::{ParticleSetting, WaveSetting};
use wavepart_core::witness::tmsv_q_for_mean_total;
use wavepart_core::{ClassicalEnsemble, Complex64, ModePreparation, RunConfig, DEFAULT_D_BINS};

use crate::CliError;

/// Efficiency of the squeezed-light preset.
pub const PRESET_ETA: f64 = 0.024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: InputSection,
    #[serde(default)]
    pub interferometer: Interferometer,
    #[serde(default)]
    pub loss: Loss,
    #[serde(default)]
    pub detector: Detector,
    pub run: Run,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSection {
    /// Arbitrary product input of two prepared modes.
    Quantum {
        mode_a: ModePreparation,
        mode_b: ModePreparation,
    },
    /// Two squeezed states that interfere into a two-mode squeezed vacuum;
    /// give either `q` or the detected `mean_total`.
    Tmsv {
        q: Option<f64>,
        mean_total: Option<f64>,
    },
    Particle {
        settings: Vec<ParticleEntry>,
    },
    Wave {
        settings: Vec<WaveEntry>,
    },
    Thermal {
        nbar_a: f64,
        nbar_b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleEntry {
    pub x: u64,
    pub y: u64,
    #[serde(default = "one")]
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveEntry {
    #[serde(default)]
    pub x_re: f64,
    #[serde(default)]
    pub x_im: f64,
    #[serde(default)]
    pub y_re: f64,
    #[serde(default)]
    pub y_im: f64,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interferometer {
    pub theta: f64,
}

impl Default for Interferometer {
    fn default() -> Self {
        Interferometer { theta: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Loss {
    pub eta: f64,
}

impl Default for Loss {
    fn default() -> Self {
        Loss { eta: PRESET_ETA }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detector {
    pub d_bins: usize,
}

impl Default for Detector {
    fn default() -> Self {
        Detector {
            d_bins: DEFAULT_D_BINS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Largest tolerated truncation tail mass.
    pub tau: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { tau: DEFAULT_TAU }
    }
}

/// What a configuration asks the simulator to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Quantum(ModePreparation, ModePreparation),
    Classical(ClassicalEnsemble),
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
        cfg.run_config().validate()?;
        if !(cfg.analysis.tau > 0.0) {
            return Err(CliError::Input("analysis.tau must be > 0".into()));
        }
        cfg.source()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            shots: self.run.shots,
            seed: self.run.seed,
            eta: self.loss.eta,
            theta: self.interferometer.theta,
            d_bins: self.detector.d_bins,
        }
    }

    pub fn source(&self) -> Result<Source, CliError> {
        let src = match &self.input {
            InputSection::Quantum { mode_a, mode_b } => {
                mode_a.validate()?;
                mode_b.validate()?;
                Source::Quantum(*mode_a, *mode_b)
            }
            InputSection::Tmsv { q, mean_total } => {
                let q = match (q, mean_total) {
                    (Some(q), None) => *q,
                    (None, Some(mt)) => tmsv_q_for_mean_total(*mt, self.loss.eta)?,
                    _ => {
                        return Err(CliError::Input(
                            "tmsv input needs exactly one of `q` or `mean_total`".into(),
                        ))
                    }
                };
                let (a, b) = wavepart_core::tmsv_inputs(q)?;
                Source::Quantum(a, b)
            }
            InputSection::Particle { settings } => Source::Classical(ClassicalEnsemble::Particle(
                settings
                    .iter()
                    .map(|s| ParticleSetting {
                        x: s.x,
                        y: s.y,
                        weight: s.weight,
                    })
                    .collect(),
            )),
            InputSection::Wave { settings } => Source::Classical(ClassicalEnsemble::Wave(
                settings
                    .iter()
                    .map(|s| WaveSetting {
                        x: Complex64::new(s.x_re, s.x_im),
                        y: Complex64::new(s.y_re, s.y_im),
                        weight: s.weight,
                    })
                    .collect(),
            )),
            InputSection::Thermal { nbar_a, nbar_b } => {
                Source::Classical(ClassicalEnsemble::ThermalWave {
                    nbar_a: *nbar_a,
                    nbar_b: *nbar_b,
                })
            }
        };
        if let Source::Classical(ens) = &src {
            ens.validate()?;
        }
        Ok(src)
    }

    /// One-line description of the input section.
    pub fn input_description(&self) -> String {
        serde_json::to_string(&self.input).expect("input serializes")
    }
}
