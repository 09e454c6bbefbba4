//! Seeded Monte Carlo generators.
//!
//! Shots are split into fixed-size chunks; chunk `i` draws from a ChaCha8
//! stream `i` keyed by the run seed, so results depend only on
//! `(seed, shots)` and not on how many rayon workers run the chunks.
//! Histograms merge by integer addition.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{ClickDistribution, ClickHistogram, DEFAULT_D_BINS};
use crate::error::{invalid, Result};
use crate::fock::JointNumberDistribution;

/// Shots per RNG stream.
pub const CHUNK_SHOTS: u64 = 1 << 16;

/// Largest bin count the shot sampler supports (bitmask width).
pub const MAX_D_BINS: usize = 128;

/// Parameters of one simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub shots: u64,
    pub seed: u64,
    pub eta: f64,
    pub theta: f64,
    pub d_bins: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            shots: 1_000_000,
            seed: 0,
            eta: 1.0,
            theta: 0.0,
            d_bins: DEFAULT_D_BINS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(invalid("shots must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(invalid(format!(
                "efficiency must lie in [0,1], got {}",
                self.eta
            )));
        }
        if !self.theta.is_finite() {
            return Err(invalid("theta must be finite"));
        }
        if self.d_bins == 0 || self.d_bins > MAX_D_BINS {
            return Err(invalid(format!(
                "d_bins must lie in 1..={MAX_D_BINS}, got {}",
                self.d_bins
            )));
        }
        Ok(())
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `body(rng, n)` over all chunks in parallel and folds the results.
fn run_chunked<H, F, M>(shots: u64, seed: u64, body: F, merge: M) -> H
where
    H: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> H + Sync,
    M: Fn(H, H) -> H + Sync,
{
    let n_chunks = shots.div_ceil(CHUNK_SHOTS);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK_SHOTS.min(shots - c * CHUNK_SHOTS);
            body(&mut chunk_rng(seed, c), n)
        })
        .reduce_with(&merge)
        .expect("at least one chunk")
}

/// Number of distinct bins hit by `n` photons thrown uniformly into `d` bins.
fn throw_photons<R: Rng>(rng: &mut R, n: u64, d: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let mut mask: u128 = 0;
    for _ in 0..n {
        mask |= 1u128 << rng.random_range(0..d);
        if mask.count_ones() as usize == d {
            break;
        }
    }
    mask.count_ones() as usize
}

/// Simulated click-detector experiment on photon-number statistics.
///
/// Loss is expected to be applied to `dist` already; `cfg.eta` and
/// `cfg.theta` are not used here.
pub fn sample_quantum_shots(
    dist: &JointNumberDistribution,
    cfg: &RunConfig,
) -> Result<ClickHistogram> {
    cfg.validate()?;
    let cells: Vec<(usize, usize, f64)> = dist.iter_nonzero().collect();
    if cells.is_empty() {
        return Err(invalid("photon-number distribution is empty"));
    }
    let index = WeightedIndex::new(cells.iter().map(|c| c.2))
        .map_err(|e| invalid(format!("bad photon-number weights: {e}")))?;
    let d = cfg.d_bins;
    let hist = run_chunked(
        cfg.shots,
        cfg.seed,
        |rng, n| {
            let mut h = ClickHistogram::empty(d, cfg.seed);
            for _ in 0..n {
                let (n_a, n_b, _) = cells[index.sample(rng)];
                let k_a = throw_photons(rng, n_a as u64, d);
                let k_b = throw_photons(rng, n_b as u64, d);
                h.add(k_a, k_b, 1);
            }
            h
        },
        |mut a, b| {
            a.merge(&b).expect("same detector");
            a
        },
    );
    Ok(hist)
}

/// Multinomial sampling of click outcomes from an exact click distribution.
pub fn sample_clicks(dist: &ClickDistribution, shots: u64, seed: u64) -> Result<ClickHistogram> {
    use crate::detector::ClickStatistics;
    if shots == 0 {
        return Err(invalid("shots must be >= 1"));
    }
    let cells = dist.cells();
    let index = WeightedIndex::new(cells.iter().map(|c| c.2))
        .map_err(|e| invalid(format!("bad click weights: {e}")))?;
    let d = dist.d_bins();
    Ok(run_chunked(
        shots,
        seed,
        |rng, n| {
            let mut h = ClickHistogram::empty(d, seed);
            for _ in 0..n {
                let (k_a, k_b, _) = cells[index.sample(rng)];
                h.add(k_a, k_b, 1);
            }
            h
        },
        |mut a, b| {
            a.merge(&b).expect("same detector");
            a
        },
    ))
}

/// Particle numbers `(X, Y)` entering the two input ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleSetting {
    pub x: u64,
    pub y: u64,
    pub weight: f64,
}

/// Complex field amplitudes `(X, Y)` entering the two input ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSetting {
    pub x: Complex64,
    pub y: Complex64,
    pub weight: f64,
}

/// Distribution `P(X, Y)` of classical input settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassicalEnsemble {
    Particle(Vec<ParticleSetting>),
    Wave(Vec<WaveSetting>),
    /// Independent circular Gaussian amplitudes with `E|X|^2 = nbar_a`,
    /// `E|Y|^2 = nbar_b` (thermal light).
    ThermalWave {
        nbar_a: f64,
        nbar_b: f64,
    },
}

impl ClassicalEnsemble {
    pub fn validate(&self) -> Result<()> {
        let weights: Vec<f64> = match self {
            ClassicalEnsemble::Particle(s) => s.iter().map(|s| s.weight).collect(),
            ClassicalEnsemble::Wave(s) => {
                if s.iter().any(|s| {
                    !(s.x.re.is_finite()
                        && s.x.im.is_finite()
                        && s.y.re.is_finite()
                        && s.y.im.is_finite())
                }) {
                    return Err(invalid("wave amplitudes must be finite"));
                }
                s.iter().map(|s| s.weight).collect()
            }
            ClassicalEnsemble::ThermalWave { nbar_a, nbar_b } => {
                if !(*nbar_a >= 0.0 && *nbar_b >= 0.0 && nbar_a.is_finite() && nbar_b.is_finite()) {
                    return Err(invalid(
                        "thermal mean photon numbers must be finite and >= 0",
                    ));
                }
                return Ok(());
            }
        };
        if weights.is_empty() {
            return Err(invalid("ensemble has no settings"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().sum::<f64>() <= 0.0
        {
            return Err(invalid(
                "ensemble weights must be nonnegative with positive sum",
            ));
        }
        Ok(())
    }
}

/// Sparse `(M, N)` count histogram from a perfectly resolving detector.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountHistogram {
    pub counts: BTreeMap<(u64, u64), u64>,
    pub shots: u64,
    pub seed: u64,
}

impl CountHistogram {
    pub fn new(seed: u64) -> Self {
        CountHistogram {
            counts: BTreeMap::new(),
            shots: 0,
            seed,
        }
    }

    pub fn add(&mut self, m: u64, n: u64, count: u64) {
        *self.counts.entry((m, n)).or_insert(0) += count;
        self.shots += count;
    }

    pub fn merge(&mut self, other: &CountHistogram) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.shots += other.shots;
    }
}

fn merge_counts(mut a: CountHistogram, b: CountHistogram) -> CountHistogram {
    a.merge(&b);
    a
}

/// Binomial particle model: thin each particle with `eta`, then route each
/// survivor to either detector with probability 1/2.
pub fn sample_classical_particles(
    ens: &ClassicalEnsemble,
    cfg: &RunConfig,
) -> Result<CountHistogram> {
    cfg.validate()?;
    ens.validate()?;
    let ClassicalEnsemble::Particle(settings) = ens else {
        return Err(invalid("particle sampler needs a particle ensemble"));
    };
    let index = WeightedIndex::new(settings.iter().map(|s| s.weight))
        .map_err(|e| invalid(format!("bad ensemble weights: {e}")))?;
    let eta = cfg.eta;
    Ok(run_chunked(
        cfg.shots,
        cfg.seed,
        |rng, n| {
            let mut h = CountHistogram::new(cfg.seed);
            for _ in 0..n {
                let s = settings[index.sample(rng)];
                let total = s.x + s.y;
                let survivors = binomial_draw(rng, total, eta);
                let m = binomial_draw(rng, survivors, 0.5);
                h.add(m, survivors - m, 1);
            }
            h
        },
        merge_counts,
    ))
}

fn binomial_draw<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

fn poisson_draw<R: Rng>(rng: &mut R, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("valid poisson").sample(rng) as u64
}

/// Poisson wave model: the beam splitter maps `X' = (X + e^{i theta} Y)/sqrt 2`,
/// `Y' = (Y - e^{-i theta} X)/sqrt 2`; the detectors then count
/// `M ~ Poisson(eta |X'|^2)` and `N ~ Poisson(eta |Y'|^2)` independently.
pub fn sample_classical_waves(ens: &ClassicalEnsemble, cfg: &RunConfig) -> Result<CountHistogram> {
    cfg.validate()?;
    ens.validate()?;
    let phase = Complex64::from_polar(1.0, cfg.theta);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let eta = cfg.eta;
    let detect = move |rng: &mut ChaCha8Rng, x: Complex64, y: Complex64| {
        let xo = (x + phase * y) * s;
        let yo = (y - phase.conj() * x) * s;
        (
            poisson_draw(rng, eta * xo.norm_sqr()),
            poisson_draw(rng, eta * yo.norm_sqr()),
        )
    };
    match ens {
        ClassicalEnsemble::Wave(settings) => {
            let index = WeightedIndex::new(settings.iter().map(|s| s.weight))
                .map_err(|e| invalid(format!("bad ensemble weights: {e}")))?;
            Ok(run_chunked(
                cfg.shots,
                cfg.seed,
                |rng, n| {
                    let mut h = CountHistogram::new(cfg.seed);
                    for _ in 0..n {
                        let st = settings[index.sample(rng)];
                        let (m, k) = detect(rng, st.x, st.y);
                        h.add(m, k, 1);
                    }
                    h
                },
                merge_counts,
            ))
        }
        ClassicalEnsemble::ThermalWave { nbar_a, nbar_b } => {
            let na = Normal::new(0.0, (nbar_a / 2.0).sqrt()).expect("finite sigma");
            let nb = Normal::new(0.0, (nbar_b / 2.0).sqrt()).expect("finite sigma");
            Ok(run_chunked(
                cfg.shots,
                cfg.seed,
                |rng, n| {
                    let mut h = CountHistogram::new(cfg.seed);
                    for _ in 0..n {
                        let x = Complex64::new(na.sample(rng), na.sample(rng));
                        let y = Complex64::new(nb.sample(rng), nb.sample(rng));
                        let (m, k) = detect(rng, x, y);
                        h.add(m, k, 1);
                    }
                    h
                },
                merge_counts,
            ))
        }
        ClassicalEnsemble::Particle(_) => Err(invalid("wave sampler needs a wave ensemble")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(shots: u64, seed: u64) -> RunConfig {
        RunConfig {
            shots,
            seed,
            ..RunConfig::default()
        }
    }

    #[test]
    fn vacuum_shots_all_at_origin() {
        let h = sample_quantum_shots(&JointNumberDistribution::point(0, 0), &cfg(1000, 3)).unwrap();
        assert_eq!(h.count(0, 0), 1000);
        assert_eq!(h.total_shots(), 1000);
    }

    #[test]
    fn reproducible_and_chunk_independent() {
        let d = JointNumberDistribution::new(1, vec![0.4, 0.2, 0.1, 0.3]).unwrap();
        let shots = 3 * CHUNK_SHOTS + 17;
        let a = sample_quantum_shots(&d, &cfg(shots, 11)).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_quantum_shots(&d, &cfg(shots, 11)).unwrap());
        assert_eq!(a, b);
        let c = sample_quantum_shots(&d, &cfg(shots, 12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn particle_examples() {
        let vac = ClassicalEnsemble::Particle(vec![ParticleSetting {
            x: 0,
            y: 0,
            weight: 1.0,
        }]);
        let h = sample_classical_particles(&vac, &cfg(500, 1)).unwrap();
        assert_eq!(h.counts.get(&(0, 0)), Some(&500));

        let single = ClassicalEnsemble::Particle(vec![ParticleSetting {
            x: 1,
            y: 0,
            weight: 1.0,
        }]);
        let n = 200_000u64;
        let h = sample_classical_particles(&single, &cfg(n, 2)).unwrap();
        assert_eq!(h.counts.len(), 2);
        let top = *h.counts.get(&(1, 0)).unwrap() as f64 / n as f64;
        // Cov(M,N) = -p(1-p) with p = top fraction; expected -1/4
        let cov = -top * (1.0 - top);
        assert!((cov + 0.25).abs() < 4.0 * (0.25 / n as f64).sqrt());
        assert!(sample_classical_waves(&single, &cfg(10, 1)).is_err());
    }

    #[test]
    fn wave_examples() {
        let z = Complex64::new(0.0, 0.0);
        let dark = ClassicalEnsemble::Wave(vec![WaveSetting {
            x: z,
            y: z,
            weight: 1.0,
        }]);
        let h = sample_classical_waves(&dark, &cfg(400, 1)).unwrap();
        assert_eq!(h.counts.get(&(0, 0)), Some(&400));

        let bad = ClassicalEnsemble::Wave(vec![WaveSetting {
            x: z,
            y: z,
            weight: -1.0,
        }]);
        assert!(sample_classical_waves(&bad, &cfg(10, 1)).is_err());
        assert!(sample_classical_particles(&dark, &cfg(10, 1)).is_err());
    }

    #[test]
    fn throw_photons_saturates() {
        let mut rng = chunk_rng(5, 0);
        assert_eq!(throw_photons(&mut rng, 0, 8), 0);
        assert_eq!(throw_photons(&mut rng, 1, 8), 1);
        assert_eq!(throw_photons(&mut rng, 10_000, 8), 8);
        assert_eq!(throw_photons(&mut rng, 5, 1), 1);
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.shots = 0;
        assert!(c.validate().is_err());
        c = RunConfig {
            eta: 1.5,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        c = RunConfig {
            d_bins: 0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
