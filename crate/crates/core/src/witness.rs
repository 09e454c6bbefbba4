//! Covariance matrix, classical bounds and the minimal-eigenvalue witnesses.
//!
//! `C - B >= 0` holds for any classical input ensemble; a negative minimal
//! eigenvalue of `C - B_wave` (resp. `C - B_part`) rules out the wave
//! (resp. particle) description.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fock::MomentSet;

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMatrix2 {
    pub const ZERO: SymMatrix2 = SymMatrix2 {
        a11: 0.0,
        a12: 0.0,
        a22: 0.0,
    };

    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        SymMatrix2 { a11, a12, a22 }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn sub(&self, other: &SymMatrix2) -> SymMatrix2 {
        SymMatrix2::new(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a22 - other.a22,
        )
    }

    pub fn scale(&self, k: f64) -> SymMatrix2 {
        SymMatrix2::new(k * self.a11, k * self.a12, k * self.a22)
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    /// Closed-form minimal eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self)
    }

    /// Partial derivatives of the minimal eigenvalue with respect to
    /// `(a11, a12, a22)`.
    ///
    /// At the degenerate point `a11 = a22, a12 = 0` the one-sided
    /// derivative `d/da12 = -1` is used, with `1/2` for both diagonal entries.
    pub fn min_eigenvalue_gradient(&self) -> [f64; 3] {
        let half_diff = 0.5 * (self.a11 - self.a22);
        let radius = half_diff.hypot(self.a12);
        if radius == 0.0 {
            return [0.5, -1.0, 0.5];
        }
        [
            0.5 - 0.5 * half_diff / radius,
            -self.a12 / radius,
            0.5 + 0.5 * half_diff / radius,
        ]
    }
}

/// `(a11 + a22)/2 - sqrt(((a11 - a22)/2)^2 + a12^2)`.
pub fn min_eigenvalue(s: &SymMatrix2) -> f64 {
    let mean = 0.5 * (s.a11 + s.a22);
    let half_diff = 0.5 * (s.a11 - s.a22);
    mean - half_diff.hypot(s.a12)
}

/// `[[Var(M), Cov(M,N)], [Cov(M,N), Var(N)]]`.
pub fn covariance_matrix(m: &MomentSet) -> SymMatrix2 {
    SymMatrix2::new(m.var_a(), m.cov_ab(), m.var_b())
}

/// Particle bound `E(M+N)/4 [[1,-1],[-1,1]]`.
pub fn bound_particle(m: &MomentSet) -> SymMatrix2 {
    let k = 0.25 * m.mean_total();
    SymMatrix2::new(k, -k, k)
}

/// Wave bound `diag(E(M), E(N))`.
pub fn bound_wave(m: &MomentSet) -> SymMatrix2 {
    SymMatrix2::new(m.mean_a, 0.0, m.mean_b)
}

/// Minimal eigenvalues and their uncertainties.
///
/// Significances are `|e| / (random + systematic)` for negative `e` and
/// zero otherwise; with no attached uncertainty they are also zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub e_wave: f64,
    pub e_part: f64,
    pub err_wave_random: f64,
    pub err_part_random: f64,
    pub err_wave_sys: f64,
    pub err_part_sys: f64,
    pub significance_wave: f64,
    pub significance_part: f64,
}

impl WitnessResult {
    pub fn exact(e_wave: f64, e_part: f64) -> Self {
        WitnessResult {
            e_wave,
            e_part,
            err_wave_random: 0.0,
            err_part_random: 0.0,
            err_wave_sys: 0.0,
            err_part_sys: 0.0,
            significance_wave: 0.0,
            significance_part: 0.0,
        }
    }

    pub fn err_wave_total(&self) -> f64 {
        self.err_wave_random + self.err_wave_sys
    }

    pub fn err_part_total(&self) -> f64 {
        self.err_part_random + self.err_part_sys
    }

    /// `|e| / sigma_random` for negative `e` (zero otherwise).
    pub fn random_significance_wave(&self) -> f64 {
        significance(self.e_wave, self.err_wave_random)
    }

    pub fn random_significance_part(&self) -> f64 {
        significance(self.e_part, self.err_part_random)
    }
}

pub(crate) fn significance(e: f64, sigma: f64) -> f64 {
    if e < 0.0 && sigma > 0.0 {
        -e / sigma
    } else {
        0.0
    }
}

/// `C - B_wave`.
pub fn wave_matrix(m: &MomentSet) -> SymMatrix2 {
    covariance_matrix(m).sub(&bound_wave(m))
}

/// `C - B_part`.
pub fn particle_matrix(m: &MomentSet) -> SymMatrix2 {
    covariance_matrix(m).sub(&bound_particle(m))
}

/// Both witnesses for an exact moment set (no uncertainties attached).
pub fn witness_pair(m: &MomentSet) -> WitnessResult {
    WitnessResult::exact(
        wave_matrix(m).min_eigenvalue(),
        particle_matrix(m).min_eigenvalue(),
    )
}

/// Closed-form prediction for a lossy two-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub e_wave: f64,
    pub e_part: f64,
    pub mean_total: f64,
}

/// `e_wave = e_part = -eta^2 q/(1-q)`, `mean_total = 2 eta q/(1-q)`.
pub fn analytic_tmsv(q: f64, eta: f64) -> Result<TheoryPoint> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q must lie in (0,1), got {q}")));
    }
    check_eta(eta)?;
    let ratio = q / (1.0 - q);
    let e = -eta * eta * ratio;
    Ok(TheoryPoint {
        e_wave: e,
        e_part: e,
        mean_total: 2.0 * eta * ratio,
    })
}

/// TMSV squeezing parameter `q` giving total mean photon number
/// `mean_total` at efficiency `eta`.
pub fn tmsv_q_for_mean_total(mean_total: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid(format!("efficiency must lie in (0,1], got {eta}")));
    }
    if !(mean_total > 0.0 && mean_total.is_finite()) {
        return Err(invalid("mean_total must be positive"));
    }
    let ratio = mean_total / (2.0 * eta);
    Ok(ratio / (1.0 + ratio))
}

/// Coherent input `|alpha, beta>`: `e_wave = 0` and
/// `e_part = eta S/4 [1 - sqrt(1 + (4 Re[e^{i theta} beta alpha*]/S)^2)]`
/// with `S = |alpha|^2 + |beta|^2`.
pub fn analytic_coherent(alpha: Complex64, beta: Complex64, theta: f64, eta: f64) -> (f64, f64) {
    let total = alpha.norm_sqr() + beta.norm_sqr();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let cross = (Complex64::from_polar(1.0, theta) * beta * alpha.conj()).re;
    let ratio = 4.0 * cross / total;
    let e_part = eta * total / 4.0 * (1.0 - (1.0 + ratio * ratio).sqrt());
    (0.0, e_part)
}

/// Fock input `|m, n>`: `e_wave = -eta^2 (m+n)/2`,
/// `e_part = min{eta^2 m n, eta (1-eta)(m+n)/2}`.
pub fn analytic_fock(m: u64, n: u64, eta: f64) -> (f64, f64) {
    let (mf, nf) = (m as f64, n as f64);
    let e_wave = -eta * eta * (mf + nf) / 2.0;
    let e_part = (eta * eta * mf * nf).min(eta * (1.0 - eta) * (mf + nf) / 2.0);
    (e_wave, e_part)
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(invalid(format!("efficiency must lie in [0,1], got {eta}")))
    }
}
