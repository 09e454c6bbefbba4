//! Truncated two-mode Fock-space engine.
//!
//! States are pure and stored as dense amplitude matrices `psi[n_a][n_b]`
//! with a common cutoff. Everything that leaves the truncated space is
//! accounted for as tail mass (`1 - sum of probabilities`), which every
//! later stage carries forward.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::math::{binomial_pmf_row, ln_factorials};

/// Largest cutoff `ModePreparation::cutoff_for` will search.
pub const MAX_CUTOFF: usize = 4096;

/// Default truncation tolerance for pipelines.
pub const DEFAULT_TAU: f64 = 1e-10;

/// Preparation of a single input mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModePreparation {
    Vacuum,
    Coherent {
        re: f64,
        im: f64,
    },
    Fock {
        n: usize,
    },
    /// Squeezed vacuum `S(r e^{i phi})|0>`.
    Squeezed {
        r: f64,
        phi: f64,
    },
}

impl ModePreparation {
    pub fn coherent(alpha: Complex64) -> Self {
        ModePreparation::Coherent {
            re: alpha.re,
            im: alpha.im,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModePreparation::Vacuum | ModePreparation::Fock { .. } => Ok(()),
            ModePreparation::Coherent { re, im } => {
                if re.is_finite() && im.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("coherent amplitude must be finite"))
                }
            }
            ModePreparation::Squeezed { r, phi } => {
                if !(r.is_finite() && phi.is_finite()) {
                    Err(invalid("squeezing parameters must be finite"))
                } else if r < 0.0 {
                    Err(invalid(format!("squeezing r must be >= 0, got {r}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Fock amplitudes `a_0 ..= a_{n_max}` of this preparation.
    pub fn amplitudes(&self, n_max: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
        match *self {
            ModePreparation::Vacuum => out[0] = Complex64::new(1.0, 0.0),
            ModePreparation::Fock { n } => {
                if n <= n_max {
                    out[n] = Complex64::new(1.0, 0.0);
                }
            }
            ModePreparation::Coherent { re, im } => {
                let alpha = Complex64::new(re, im);
                let mod2 = alpha.norm_sqr();
                if mod2 == 0.0 {
                    out[0] = Complex64::new(1.0, 0.0);
                    return out;
                }
                let (ln_abs, arg) = (alpha.norm().ln(), alpha.arg());
                let lf = ln_factorials(n_max);
                for (n, a) in out.iter_mut().enumerate() {
                    let ln_mag = -0.5 * mod2 + n as f64 * ln_abs - 0.5 * lf[n];
                    *a = Complex64::from_polar(ln_mag.exp(), n as f64 * arg);
                }
            }
            ModePreparation::Squeezed { r, phi } => {
                let t = r.tanh();
                if t == 0.0 {
                    out[0] = Complex64::new(1.0, 0.0);
                    return out;
                }
                // a_{2k} = (-e^{i phi} tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r))
                let lf = ln_factorials(n_max);
                let ln_norm = -0.5 * r.cosh().ln();
                let (ln_t, ln2) = (t.ln(), std::f64::consts::LN_2);
                for k in 0..=n_max / 2 {
                    let kf = k as f64;
                    let ln_mag = ln_norm + kf * ln_t + 0.5 * lf[2 * k] - kf * ln2 - lf[k];
                    out[2 * k] =
                        Complex64::from_polar(ln_mag.exp(), kf * (phi + std::f64::consts::PI));
                }
            }
        }
        out
    }

    /// Smallest cutoff `N` with `sum_{n>N} (n+1)^2 p_n <= tau`.
    ///
    /// The weight bounds both the discarded probability and its share of
    /// second moments. The tail is summed from the far end so that values
    /// well below machine epsilon are still resolved.
    pub fn cutoff_for(&self, tau: f64) -> Result<usize> {
        self.validate()?;
        if !(tau > 0.0) {
            return Err(invalid("tau must be > 0"));
        }
        match *self {
            ModePreparation::Vacuum => return Ok(0),
            ModePreparation::Fock { n } => return Ok(n),
            _ => {}
        }
        let probs: Vec<f64> = self
            .amplitudes(MAX_CUTOFF)
            .iter()
            .map(|a| a.norm_sqr())
            .collect();
        let last = MAX_CUTOFF as f64 + 1.0;
        let missing = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        if probs[MAX_CUTOFF] * last * last > tau || missing > 0.5 {
            return Err(Error::TruncationTooSmall {
                tail: missing.max(probs[MAX_CUTOFF]),
                tau,
            });
        }
        let mut tail = 0.0;
        let mut cutoff = MAX_CUTOFF;
        for n in (1..=MAX_CUTOFF).rev() {
            let w = (n as f64 + 1.0).powi(2);
            if tail + w * probs[n] > tau {
                break;
            }
            tail += w * probs[n];
            cutoff = n - 1;
        }
        Ok(cutoff)
    }
}

/// Pure two-mode state on `{0..=n_max}^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    n_max: usize,
    amps: Vec<Complex64>,
}

impl TwoModeState {
    /// Build from a row-major amplitude matrix of size `(n_max+1)^2`.
    pub fn from_amplitudes(n_max: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = n_max + 1;
        if amps.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} amplitudes for n_max={n_max}, got {}",
                dim * dim,
                amps.len()
            )));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(invalid("amplitudes must be finite"));
        }
        let state = TwoModeState { n_max, amps };
        if state.norm_sqr() > 1.0 + 1e-9 {
            return Err(invalid("state norm exceeds 1"));
        }
        Ok(state)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        if n_a > self.n_max || n_b > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.amps[n_a * (self.n_max + 1) + n_b]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0)
    }
}

/// Product state `a_m b_n` of two single-mode preparations.
pub fn prepare_two_mode(
    prep_a: ModePreparation,
    prep_b: ModePreparation,
    n_max: usize,
    tau: f64,
) -> Result<TwoModeState> {
    prep_a.validate()?;
    prep_b.validate()?;
    if !(tau > 0.0) {
        return Err(invalid("tau must be > 0"));
    }
    let a = prep_a.amplitudes(n_max);
    let b = prep_b.amplitudes(n_max);
    let mut amps = Vec::with_capacity(a.len() * b.len());
    for am in &a {
        for bn in &b {
            amps.push(am * bn);
        }
    }
    let state = TwoModeState { n_max, amps };
    let tail = state.tail_mass();
    if tail > tau {
        return Err(Error::TruncationTooSmall { tail, tau });
    }
    Ok(state)
}

/// Like [`prepare_two_mode`], picking the smallest common cutoff that keeps
/// the total tail mass within `tau`.
pub fn prepare_two_mode_auto(
    prep_a: ModePreparation,
    prep_b: ModePreparation,
    tau: f64,
) -> Result<TwoModeState> {
    let n_max = prep_a
        .cutoff_for(0.5 * tau)?
        .max(prep_b.cutoff_for(0.5 * tau)?);
    prepare_two_mode(prep_a, prep_b, n_max, tau)
}

/// 50:50 beam splitter with phase `theta`.
///
/// In the Heisenberg picture `a -> (a + e^{i theta} b)/sqrt 2` and
/// `b -> (-e^{-i theta} a + b)/sqrt 2`, so a coherent input `|alpha, beta>`
/// leaves as `|(alpha + e^{i theta} beta)/sqrt 2, (beta - e^{-i theta} alpha)/sqrt 2>`.
///
/// The unitary conserves the total photon number `N`. On block `N` its
/// matrix is `e^{i theta (p - m)} X_N[p][m]` (output `|p, N-p>`, input
/// `|m, N-m>`) with `X_N` real. `X_N` follows from `X_{N-1}` through
/// `U = (A^dag U a + B^dag U b)/N` on the block, where `A^dag, B^dag` are the
/// images of `a^dag, b^dag`. That map has norm `1 + O(1/N)`, so rounding
/// errors grow only like `sqrt N` (building images by repeated raising
/// amplifies them exponentially).
/// The output cutoff grows to the largest occupied total photon number.
pub fn apply_beam_splitter(state: &TwoModeState, theta: f64) -> TwoModeState {
    let n_max = state.n_max;
    let dim = n_max + 1;
    let zero = Complex64::new(0.0, 0.0);

    let occupied_total = (0..dim)
        .flat_map(|m| (0..dim).map(move |n| (m, n)))
        .filter(|&(m, n)| state.amps[m * dim + n] != zero)
        .map(|(m, n)| m + n)
        .max()
        .unwrap_or(0);
    let out_max = n_max.max(occupied_total);
    let out_dim = out_max + 1;
    let mut out = vec![zero; out_dim * out_dim];
    let phases: Vec<Complex64> = (0..=2 * occupied_total)
        .map(|k| Complex64::from_polar(1.0, theta * (k as f64 - occupied_total as f64)))
        .collect();
    let sqrt: Vec<f64> = (0..=occupied_total).map(|k| (k as f64).sqrt()).collect();

    // block N matrix, row-major [p][m]
    let mut x = vec![1.0f64];
    for total in 0..=occupied_total {
        if total > 0 {
            let prev_dim = total;
            let cur_dim = total + 1;
            let at = |p: usize, m: usize| -> f64 {
                if p < prev_dim && m < prev_dim {
                    x[p * prev_dim + m]
                } else {
                    0.0
                }
            };
            let k = 1.0 / (total as f64 * std::f64::consts::SQRT_2);
            let mut next = vec![0.0; cur_dim * cur_dim];
            for p in 0..cur_dim {
                let q = total - p;
                for m in 0..cur_dim {
                    let n = total - m;
                    let mut v = 0.0;
                    if m > 0 {
                        let lo = if p > 0 {
                            sqrt[p] * at(p - 1, m - 1)
                        } else {
                            0.0
                        };
                        v += sqrt[m] * (lo - sqrt[q] * at(p, m - 1));
                    }
                    if n > 0 {
                        let lo = if p > 0 { sqrt[p] * at(p - 1, m) } else { 0.0 };
                        v += sqrt[n] * (lo + sqrt[q] * at(p, m));
                    }
                    next[p * cur_dim + m] = k * v;
                }
            }
            x = next;
        }
        let cur_dim = total + 1;
        let m_lo = total.saturating_sub(n_max);
        let m_hi = total.min(n_max);
        if (m_lo..=m_hi).all(|m| state.amps[m * dim + total - m] == zero) {
            continue;
        }
        for p in 0..cur_dim {
            let mut acc = zero;
            for m in m_lo..=m_hi {
                let psi = state.amps[m * dim + total - m];
                if psi != zero {
                    acc += phases[occupied_total + p - m] * x[p * cur_dim + m] * psi;
                }
            }
            out[p * out_dim + (total - p)] = acc;
        }
    }

    TwoModeState {
        n_max: out_max,
        amps: out,
    }
}

/// Joint photon-number statistics `p[n_a][n_b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointNumberDistribution {
    n_max: usize,
    probs: Vec<f64>,
}

impl JointNumberDistribution {
    /// Build from a row-major probability matrix of size `(n_max+1)^2`.
    pub fn new(n_max: usize, probs: Vec<f64>) -> Result<Self> {
        let dim = n_max + 1;
        if probs.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} probabilities for n_max={n_max}, got {}",
                dim * dim,
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid("probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-9 {
            return Err(invalid(format!("probabilities sum to {total} > 1")));
        }
        Ok(JointNumberDistribution { n_max, probs })
    }

    /// Point mass at `(n_a, n_b)`.
    pub fn point(n_a: usize, n_b: usize) -> Self {
        let n_max = n_a.max(n_b);
        let dim = n_max + 1;
        let mut probs = vec![0.0; dim * dim];
        probs[n_a * dim + n_b] = 1.0;
        JointNumberDistribution { n_max, probs }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a > self.n_max || n_b > self.n_max {
            return 0.0;
        }
        self.probs[n_a * (self.n_max + 1) + n_b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.total()).max(0.0)
    }

    /// Iterates over nonzero cells as `(n_a, n_b, p)`.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let dim = self.n_max + 1;
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(move |(i, &p)| (i / dim, i % dim, p))
    }
}

/// `p[m][n] = |psi[m][n]|^2`.
pub fn number_distribution(state: &TwoModeState) -> JointNumberDistribution {
    JointNumberDistribution {
        n_max: state.n_max,
        probs: state.amps.iter().map(|a| a.norm_sqr()).collect(),
    }
}

/// Independent binomial thinning of each mode with survival probabilities
/// `eta_a`, `eta_b`.
pub fn apply_loss(
    dist: &JointNumberDistribution,
    eta_a: f64,
    eta_b: f64,
) -> Result<JointNumberDistribution> {
    for eta in [eta_a, eta_b] {
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid(format!("efficiency must lie in [0,1], got {eta}")));
        }
    }
    let dim = dist.n_max + 1;
    let lf = ln_factorials(dist.n_max);
    let rows_a: Vec<Vec<f64>> = (0..dim).map(|n| binomial_pmf_row(n, eta_a, &lf)).collect();
    let rows_b: Vec<Vec<f64>> = (0..dim).map(|n| binomial_pmf_row(n, eta_b, &lf)).collect();

    // Thin mode A.
    let mut mid = vec![0.0; dim * dim];
    for m in 0..dim {
        for n in 0..dim {
            let p = dist.probs[m * dim + n];
            if p == 0.0 {
                continue;
            }
            for (j, w) in rows_a[m].iter().enumerate() {
                mid[j * dim + n] += p * w;
            }
        }
    }
    // Thin mode B.
    let mut out = vec![0.0; dim * dim];
    for j in 0..dim {
        for n in 0..dim {
            let p = mid[j * dim + n];
            if p == 0.0 {
                continue;
            }
            for (l, w) in rows_b[n].iter().enumerate() {
                out[j * dim + l] += p * w;
            }
        }
    }
    Ok(JointNumberDistribution {
        n_max: dist.n_max,
        probs: out,
    })
}

/// First and second photon-number moments, optionally with uncertainties.
///
/// Uncertainty vectors use the component order
/// `[mean_a, mean_b, mean_a2, mean_b2, mean_ab]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_a2: f64,
    pub mean_b2: f64,
    pub mean_ab: f64,
    pub random_cov: Option<[[f64; 5]; 5]>,
    pub sys_err: Option<[f64; 5]>,
    /// Bias bounds on the factorial-basis estimates
    /// `[<n_A>, <n_B>, <n_A(n_A-1)>, <n_B(n_B-1)>, <n_A n_B>]`. These are
    /// the independent bounds behind `sys_err`; witness error propagation
    /// prefers them because `sys_err` counts the bias of `<n_A>` twice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorial_sys: Option<[f64; 5]>,
}

impl MomentSet {
    pub fn exact(mean_a: f64, mean_b: f64, mean_a2: f64, mean_b2: f64, mean_ab: f64) -> Self {
        MomentSet {
            mean_a,
            mean_b,
            mean_a2,
            mean_b2,
            mean_ab,
            random_cov: None,
            sys_err: None,
            factorial_sys: None,
        }
    }

    pub fn zero() -> Self {
        Self::exact(0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn values(&self) -> [f64; 5] {
        [
            self.mean_a,
            self.mean_b,
            self.mean_a2,
            self.mean_b2,
            self.mean_ab,
        ]
    }

    pub fn var_a(&self) -> f64 {
        self.mean_a2 - self.mean_a * self.mean_a
    }

    pub fn var_b(&self) -> f64 {
        self.mean_b2 - self.mean_b * self.mean_b
    }

    pub fn cov_ab(&self) -> f64 {
        self.mean_ab - self.mean_a * self.mean_b
    }

    pub fn mean_total(&self) -> f64 {
        self.mean_a + self.mean_b
    }

    /// Checks variance nonnegativity within `eps`.
    pub fn validate(&self, eps: f64) -> Result<()> {
        if self.values().iter().any(|v| !v.is_finite()) {
            return Err(invalid("moments must be finite"));
        }
        if self.var_a() < -eps || self.var_b() < -eps {
            return Err(invalid("moment set implies a negative variance"));
        }
        Ok(())
    }
}

/// Exact moments of a joint number distribution.
pub fn photon_moments(dist: &JointNumberDistribution) -> MomentSet {
    let mut m = MomentSet::zero();
    for (a, b, p) in dist.iter_nonzero() {
        let (a, b) = (a as f64, b as f64);
        m.mean_a += p * a;
        m.mean_b += p * b;
        m.mean_a2 += p * a * a;
        m.mean_b2 += p * b * b;
        m.mean_ab += p * a * b;
    }
    m
}
