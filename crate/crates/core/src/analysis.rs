//! From click histograms to witnesses with random and systematic errors.
//!
//! Random errors use first-order (delta-method) propagation of the sample
//! covariance of five per-shot statistics through the closed-form gradient
//! of the 2x2 minimal eigenvalue. Systematic errors are intervals and are
//! propagated linearly with absolute gradient weights.

use serde::{Deserialize, Serialize};

use crate::detector::{
    factorial_weight, moments_from_clicks, ClickDistribution, ClickHistogram, ClickStatistics,
    FactorialMoments,
};
use crate::error::{Error, Result};
use crate::fock::MomentSet;
use crate::samplers::CountHistogram;
use crate::witness::{particle_matrix, significance, wave_matrix, SymMatrix2, WitnessResult};

/// Above this total mean photon number the low-order click estimator is
/// flagged as unreliable.
pub const LOW_INTENSITY_LIMIT: f64 = 0.5;

/// Report schema tag.
pub const REPORT_FORMAT: &str = "wpd-report-v1";

fn sample_covariance(rows: &[([f64; 5], u64)], shots: u64) -> ([f64; 5], [[f64; 5]; 5]) {
    let n = shots as f64;
    let mut mean = [0.0; 5];
    for &(y, c) in rows {
        for i in 0..5 {
            mean[i] += y[i] * c as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut cov = [[0.0; 5]; 5];
    for &(y, c) in rows {
        for i in 0..5 {
            for j in 0..5 {
                cov[i][j] += c as f64 * (y[i] - mean[i]) * (y[j] - mean[j]);
            }
        }
    }
    // covariance of the mean
    let scale = 1.0 / ((n - 1.0) * n);
    for row in cov.iter_mut() {
        row.iter_mut().for_each(|v| *v *= scale);
    }
    (mean, cov)
}

/// Moments of a click histogram with random covariance and systematic bounds.
pub fn estimate_moments(h: &ClickHistogram) -> Result<MomentSet> {
    let shots = h.total_shots();
    if shots < 2 {
        return Err(Error::InsufficientData { shots });
    }
    let d = h.d_bins();
    let df = d as f64;
    let mut m = moments_from_clicks(&FactorialMoments::from_clicks(h)?)?;
    let per_shot = move |(k_a, k_b, c): (usize, usize, u64)| {
        let y = [
            df * factorial_weight(k_a, k_b, 1, 0, d),
            df * factorial_weight(k_a, k_b, 0, 1, d),
            df * df * factorial_weight(k_a, k_b, 2, 0, d)
                + df * factorial_weight(k_a, k_b, 1, 0, d),
            df * df * factorial_weight(k_a, k_b, 0, 2, d)
                + df * factorial_weight(k_a, k_b, 0, 1, d),
            df * df * factorial_weight(k_a, k_b, 1, 1, d),
        ];
        (y, c)
    };
    let (_, cov) = sample_covariance(&h.nonzero().map(per_shot).collect::<Vec<_>>(), shots);
    m.random_cov = Some(cov);
    Ok(m)
}

/// Moments of exact click probabilities (no random error).
pub fn exact_click_moments(c: &ClickDistribution) -> Result<MomentSet> {
    moments_from_clicks(&FactorialMoments::from_clicks(c)?)
}

/// Moments of perfectly resolved `(M, N)` counts; no systematic error.
pub fn count_moments(h: &CountHistogram) -> Result<MomentSet> {
    if h.shots < 2 {
        return Err(Error::InsufficientData { shots: h.shots });
    }
    let rows: Vec<_> = h
        .counts
        .iter()
        .map(|(&(m, n), &c)| {
            let (m, n) = (m as f64, n as f64);
            ([m, n, m * m, n * n, m * n], c)
        })
        .collect();
    let (mean, cov) = sample_covariance(&rows, h.shots);
    Ok(MomentSet {
        mean_a: mean[0],
        mean_b: mean[1],
        mean_a2: mean[2],
        mean_b2: mean[3],
        mean_ab: mean[4],
        random_cov: Some(cov),
        sys_err: Some([0.0; 5]),
        factorial_sys: None,
    })
}

/// Gradients of `(e_wave, e_part)` with respect to
/// `[mean_a, mean_b, mean_a2, mean_b2, mean_ab]`.
pub fn witness_gradients(m: &MomentSet) -> ([f64; 5], [f64; 5]) {
    let (ma, mb) = (m.mean_a, m.mean_b);
    // d(C - B)/d moments, rows a11, a12, a22
    let wave = [
        [-2.0 * ma - 1.0, 0.0, 1.0, 0.0, 0.0],
        [-mb, -ma, 0.0, 0.0, 1.0],
        [0.0, -2.0 * mb - 1.0, 0.0, 1.0, 0.0],
    ];
    let part = [
        [-2.0 * ma - 0.25, -0.25, 1.0, 0.0, 0.0],
        [-mb + 0.25, -ma + 0.25, 0.0, 0.0, 1.0],
        [-0.25, -2.0 * mb - 0.25, 0.0, 1.0, 0.0],
    ];
    let chain = |ge: [f64; 3], jac: [[f64; 5]; 3]| {
        let mut g = [0.0; 5];
        for (k, row) in jac.iter().enumerate() {
            for i in 0..5 {
                g[i] += ge[k] * row[i];
            }
        }
        g
    };
    (
        chain(wave_matrix(m).min_eigenvalue_gradient(), wave),
        chain(particle_matrix(m).min_eigenvalue_gradient(), part),
    )
}

/// Bound on `|e_true - e|` given bias bounds on the moments.
///
/// Works in the factorial basis `d = [N10, N01, N20, N02, N11]`
/// (`N10 = <n_A>`, `N20 = <n_A(n_A-1)>`, `N11 = <n_A n_B>`), falling back to
/// `sys_err` converted into it. The wave matrix is
/// `[[N20 - N10^2, N11 - N10 N01], [., N02 - N01^2]]`; the particle matrix
/// adds `(N10 + N01)/4` terms. Entry shifts are `J delta + Q(delta)` with
/// `Q` the product terms. With `lambda_min = t - hypot(x)`, `x = (d, c)`:
/// `d lambda = g . d a - R`, where `0 <= R <= min(2|dx|, |dx|^2 / (2 hypot(x)))`
/// by the triangle inequality and `sqrt(a^2 + b) <= a + b/(2a)`.
fn systematic_witness_bounds(m: &MomentSet) -> (f64, f64) {
    let s = match (&m.factorial_sys, &m.sys_err) {
        (Some(s), _) => *s,
        (None, Some(s)) => [s[0], s[1], s[2] + s[0], s[3] + s[1], s[4]],
        (None, None) => return (0.0, 0.0),
    };
    if s.iter().all(|&v| v == 0.0) {
        return (0.0, 0.0);
    }
    let (n10, n01) = (m.mean_a, m.mean_b);
    let quad = [s[0] * s[0], s[0] * s[1], s[1] * s[1]];
    let wave_jac = [
        [-2.0 * n10, 0.0, 1.0, 0.0, 0.0],
        [-n01, -n10, 0.0, 0.0, 1.0],
        [0.0, -2.0 * n01, 0.0, 1.0, 0.0],
    ];
    let part_jac = [
        [0.75 - 2.0 * n10, -0.25, 1.0, 0.0, 0.0],
        [0.25 - n01, 0.25 - n10, 0.0, 0.0, 1.0],
        [-0.25, 0.75 - 2.0 * n01, 0.0, 1.0, 0.0],
    ];
    let bound = |mat: SymMatrix2, jac: [[f64; 5]; 3]| {
        let g = mat.min_eigenvalue_gradient();
        let mut linear = 0.0;
        for k in 0..5 {
            let gj: f64 = (0..3).map(|i| g[i] * jac[i][k]).sum();
            linear += gj.abs() * s[k];
        }
        linear += (0..3).map(|i| g[i].abs() * quad[i]).sum::<f64>();
        let entry = |i: usize| -> f64 {
            jac[i].iter().zip(&s).map(|(j, s)| j.abs() * s).sum::<f64>() + quad[i]
        };
        let shift = (0.5 * (entry(0) + entry(2))).hypot(entry(1));
        let h = (0.5 * (mat.a11 - mat.a22)).hypot(mat.a12);
        let curvature = if h > 0.0 {
            (2.0 * shift).min(shift * shift / (2.0 * h))
        } else {
            2.0 * shift
        };
        linear + curvature
    };
    (
        bound(wave_matrix(m), wave_jac),
        bound(particle_matrix(m), part_jac),
    )
}

/// Witnesses with propagated random and systematic errors.
pub fn witness_with_errors(m: &MomentSet) -> WitnessResult {
    let e_wave = wave_matrix(m).min_eigenvalue();
    let e_part = particle_matrix(m).min_eigenvalue();
    let (gw, gp) = witness_gradients(m);
    let random = |g: &[f64; 5]| match &m.random_cov {
        Some(cov) => {
            let mut acc = 0.0;
            for i in 0..5 {
                for j in 0..5 {
                    acc += g[i] * cov[i][j] * g[j];
                }
            }
            acc.max(0.0).sqrt()
        }
        None => 0.0,
    };
    let (sw, sp) = systematic_witness_bounds(m);
    let (rw, rp) = (random(&gw), random(&gp));
    WitnessResult {
        e_wave,
        e_part,
        err_wave_random: rw,
        err_part_random: rp,
        err_wave_sys: sw,
        err_part_sys: sp,
        significance_wave: significance(e_wave, rw + sw),
        significance_part: significance(e_part, rp + sp),
    }
}

/// Value with separate random and systematic uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub random_err: f64,
    pub sys_err: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Measured {
            value,
            random_err: 0.0,
            sys_err: 0.0,
        }
    }

    pub fn total_err(&self) -> f64 {
        self.random_err + self.sys_err
    }

    /// Relative total error; infinite for a zero value with nonzero error.
    pub fn relative_err(&self) -> f64 {
        if self.value == 0.0 {
            if self.total_err() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.total_err() / self.value.abs()
        }
    }
}

/// Total mean photon number of a moment set with its errors.
pub fn mean_total(m: &MomentSet) -> Measured {
    let random_err = m
        .random_cov
        .map(|c| (c[0][0] + c[1][1] + 2.0 * c[0][1]).max(0.0).sqrt())
        .unwrap_or(0.0);
    let sys_err = m.sys_err.map(|s| s[0] + s[1]).unwrap_or(0.0);
    Measured {
        value: m.mean_total(),
        random_err,
        sys_err,
    }
}

/// Display strings in the `value(1 ± relative error)` layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub mean_total: String,
    pub e_wave: String,
    pub e_part: String,
}

/// Formats `value` as `mantissa e exponent (1±rel)`.
///
/// With `exponent = None` the exponent is chosen so the mantissa has one
/// leading digit. Relative errors of at least one are rounded to integers,
/// smaller ones to three decimals.
pub fn table_style(value: f64, rel: f64, exponent: Option<i32>, decimals: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let mut exp = exponent.unwrap_or_else(|| value.abs().log10().floor() as i32);
    let mut mantissa = value / 10f64.powi(exp);
    if exponent.is_none() {
        let rounded = format!("{:.*}", decimals, mantissa)
            .parse::<f64>()
            .unwrap_or(mantissa);
        if rounded.abs() >= 10.0 {
            exp += 1;
            mantissa = value / 10f64.powi(exp);
        }
    }
    let rel_str = if !rel.is_finite() {
        "inf".to_string()
    } else if rel >= 1.0 {
        format!("{rel:.0}")
    } else {
        format!("{rel:.3}")
    };
    format!("{mantissa:.decimals$}e{exp}(1±{rel_str})")
}

impl TableRow {
    pub fn new(mean_total: &Measured, w: &WitnessResult) -> Self {
        let rel = |v: f64, err: f64| {
            Measured {
                value: v,
                random_err: err,
                sys_err: 0.0,
            }
            .relative_err()
        };
        TableRow {
            mean_total: table_style(mean_total.value, mean_total.relative_err(), Some(-2), 3),
            e_wave: table_style(w.e_wave, rel(w.e_wave, w.err_wave_total()), None, 0),
            e_part: table_style(w.e_part, rel(w.e_part, w.err_part_total()), Some(-3), 3),
        }
    }
}

/// One analyzed run: a table row or a figure point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format: String,
    pub mean_total: Measured,
    pub witness: WitnessResult,
    pub d_bins: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub input: String,
    pub warnings: Vec<String>,
    pub table: TableRow,
}

impl AnalysisReport {
    pub fn with_run(mut self, d_bins: Option<usize>, shots: u64, seed: u64, input: &str) -> Self {
        self.d_bins = d_bins;
        self.shots = Some(shots);
        self.seed = Some(seed);
        self.input = input.to_string();
        self
    }
}

/// Packages a witness result and the total mean photon number as a report.
pub fn significance_report(r: &WitnessResult, mean_total: Measured) -> AnalysisReport {
    let mut warnings = Vec::new();
    if mean_total.value > LOW_INTENSITY_LIMIT {
        warnings.push(format!(
            "total mean photon number {:.4} exceeds {LOW_INTENSITY_LIMIT}; \
             lowest-order click estimates are unreliable",
            mean_total.value
        ));
    }
    AnalysisReport {
        format: REPORT_FORMAT.to_string(),
        mean_total,
        witness: *r,
        d_bins: None,
        shots: None,
        seed: None,
        input: String::new(),
        warnings,
        table: TableRow::new(&mean_total, r),
    }
}

/// Full analysis of a click histogram.
pub fn analyze_clicks(h: &ClickHistogram, input: &str) -> Result<AnalysisReport> {
    let m = estimate_moments(h)?;
    let w = witness_with_errors(&m);
    Ok(significance_report(&w, mean_total(&m)).with_run(
        Some(h.d_bins()),
        h.total_shots(),
        h.seed(),
        input,
    ))
}

/// Full analysis of perfectly resolved counts.
pub fn analyze_counts(h: &CountHistogram, input: &str) -> Result<AnalysisReport> {
    let m = count_moments(h)?;
    let w = witness_with_errors(&m);
    Ok(significance_report(&w, mean_total(&m)).with_run(None, h.shots, h.seed, input))
}

/// Least-squares slope through the origin of `e` against `mean_total`;
/// for TMSV data `e = -(eta/2) mean_total`, so `eta = -2 slope`.
pub fn fit_efficiency(points: &[(f64, f64)]) -> Option<f64> {
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    Some(-2.0 * sxy / sxx)
}
