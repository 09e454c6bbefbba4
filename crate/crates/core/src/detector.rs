//! Time-multiplexed click detector with `D` bins per mode.
//!
//! Every photon lands in a uniformly random bin and a bin clicks iff it is
//! occupied. Click statistics are reduced to normalized factorial moments
//! `M_{mA,mB} = E[C(kA,mA) C(kB,mB)] / (C(D,mA) C(D,mB))`, from which the
//! lowest-order photon-number moments follow.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{JointNumberDistribution, MomentSet};
use crate::math::binomial;

/// Bins per detector used throughout unless configured otherwise.
pub const DEFAULT_D_BINS: usize = 8;

/// Highest total factorial-moment order the estimator consults.
pub const MAX_TOTAL_ORDER: usize = 4;

/// `P(k clicks | n photons)` for `k = 0..=d`.
pub fn occupancy_kernel(n: usize, d: usize) -> Result<Vec<f64>> {
    Ok(occupancy_table(n, d)?.pop().expect("table has n+1 rows"))
}

/// Rows `P(. | n')` for every `n' = 0..=n_max`.
///
/// Built photon by photon: a new photon either hits one of the `k` occupied
/// bins or opens a new one. All terms are nonnegative.
pub fn occupancy_table(n_max: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    if d == 0 {
        return Err(invalid("detector needs at least one bin"));
    }
    let df = d as f64;
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut row = vec![0.0; d + 1];
    row[0] = 1.0;
    rows.push(row.clone());
    for _ in 0..n_max {
        let mut next = vec![0.0; d + 1];
        for k in 0..=d {
            if row[k] == 0.0 {
                continue;
            }
            next[k] += row[k] * k as f64 / df;
            if k < d {
                next[k + 1] += row[k] * (d - k) as f64 / df;
            }
        }
        rows.push(next.clone());
        row = next;
    }
    Ok(rows)
}

/// Read access shared by exact click distributions and histograms.
pub trait ClickStatistics {
    fn d_bins(&self) -> usize;

    /// Nonzero cells as `(k_a, k_b, weight)`; weights are probabilities.
    fn cells(&self) -> Vec<(usize, usize, f64)>;

    /// Number of shots behind the weights, `None` for exact distributions.
    fn shots(&self) -> Option<u64>;
}

/// Exact joint click probabilities `c[k_a][k_b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickDistribution {
    d_bins: usize,
    probs: Vec<f64>,
}

impl ClickDistribution {
    pub fn new(d_bins: usize, probs: Vec<f64>) -> Result<Self> {
        let dim = d_bins + 1;
        if d_bins == 0 || probs.len() != dim * dim {
            return Err(invalid(
                "click distribution needs (D+1)^2 entries with D >= 1",
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid(
                "click probabilities must be finite and nonnegative",
            ));
        }
        Ok(ClickDistribution { d_bins, probs })
    }

    pub fn get(&self, k_a: usize, k_b: usize) -> f64 {
        if k_a > self.d_bins || k_b > self.d_bins {
            return 0.0;
        }
        self.probs[k_a * (self.d_bins + 1) + k_b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.probs.iter().sum::<f64>()).max(0.0)
    }
}

impl ClickStatistics for ClickDistribution {
    fn d_bins(&self) -> usize {
        self.d_bins
    }

    fn cells(&self) -> Vec<(usize, usize, f64)> {
        let dim = self.d_bins + 1;
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i / dim, i % dim, p))
            .collect()
    }

    fn shots(&self) -> Option<u64> {
        None
    }
}

/// Integer click counts from a finite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickHistogram {
    d_bins: usize,
    counts: Vec<u64>,
    shots: u64,
    seed: u64,
}

impl ClickHistogram {
    pub fn empty(d_bins: usize, seed: u64) -> Self {
        let dim = d_bins + 1;
        ClickHistogram {
            d_bins,
            counts: vec![0; dim * dim],
            shots: 0,
            seed,
        }
    }

    /// Builds from `(k_a, k_b, count)` cells; duplicate cells add up.
    pub fn from_cells(
        d_bins: usize,
        seed: u64,
        cells: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        if d_bins == 0 {
            return Err(invalid("detector needs at least one bin"));
        }
        let mut h = ClickHistogram::empty(d_bins, seed);
        for (k_a, k_b, count) in cells {
            if k_a > d_bins || k_b > d_bins {
                return Err(invalid(format!(
                    "click outcome ({k_a},{k_b}) exceeds D={d_bins}"
                )));
            }
            h.add(k_a, k_b, count);
        }
        Ok(h)
    }

    pub fn add(&mut self, k_a: usize, k_b: usize, count: u64) {
        self.counts[k_a * (self.d_bins + 1) + k_b] += count;
        self.shots += count;
    }

    /// Adds another histogram of the same detector. Order does not matter.
    pub fn merge(&mut self, other: &ClickHistogram) -> Result<()> {
        if other.d_bins != self.d_bins {
            return Err(invalid("cannot merge histograms with different D"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.shots += other.shots;
        Ok(())
    }

    pub fn count(&self, k_a: usize, k_b: usize) -> u64 {
        self.counts[k_a * (self.d_bins + 1) + k_b]
    }

    pub fn total_shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Nonzero cells in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let dim = self.d_bins + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (i / dim, i % dim, c))
    }
}

impl ClickStatistics for ClickHistogram {
    fn d_bins(&self) -> usize {
        self.d_bins
    }

    fn cells(&self) -> Vec<(usize, usize, f64)> {
        let n = self.shots.max(1) as f64;
        self.nonzero()
            .map(|(a, b, c)| (a, b, c as f64 / n))
            .collect()
    }

    fn shots(&self) -> Option<u64> {
        Some(self.shots)
    }
}

/// `sum p(n_a, n_b) K(k_a|n_a) K(k_b|n_b)`; refuses inputs whose tail mass
/// exceeds `tau`.
pub fn click_distribution(
    dist: &JointNumberDistribution,
    d: usize,
    tau: f64,
) -> Result<ClickDistribution> {
    let tail = dist.tail_mass();
    if tail > tau {
        return Err(Error::TruncationTooSmall { tail, tau });
    }
    let n_dim = dist.n_max() + 1;
    let k_dim = d + 1;
    let kernel = occupancy_table(dist.n_max(), d)?;
    let mut mid = vec![0.0; k_dim * n_dim];
    for (n_a, n_b, p) in dist.iter_nonzero() {
        for (k_a, w) in kernel[n_a].iter().enumerate() {
            mid[k_a * n_dim + n_b] += p * w;
        }
    }
    let mut probs = vec![0.0; k_dim * k_dim];
    for k_a in 0..k_dim {
        for n_b in 0..n_dim {
            let p = mid[k_a * n_dim + n_b];
            if p == 0.0 {
                continue;
            }
            for (k_b, w) in kernel[n_b].iter().enumerate() {
                probs[k_a * k_dim + k_b] += p * w;
            }
        }
    }
    Ok(ClickDistribution { d_bins: d, probs })
}

/// One normalized factorial moment with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorialMomentEstimate {
    pub value: f64,
    pub random_err: f64,
    pub order: (usize, usize),
}

/// Per-shot weight `C(k_a,m_a) C(k_b,m_b) / (C(D,m_a) C(D,m_b))`.
pub(crate) fn factorial_weight(k_a: usize, k_b: usize, m_a: usize, m_b: usize, d: usize) -> f64 {
    binomial(k_a, m_a) * binomial(k_b, m_b) / (binomial(d, m_a) * binomial(d, m_b))
}

/// `M_{m_a,m_b}`. For histograms the random error is the standard error of
/// the bounded per-shot weight.
pub fn factorial_moment(
    c: &impl ClickStatistics,
    m_a: usize,
    m_b: usize,
) -> Result<FactorialMomentEstimate> {
    let d = c.d_bins();
    if m_a > d || m_b > d {
        return Err(Error::OrderTooHigh {
            m_a,
            m_b,
            d_bins: d,
        });
    }
    let cells = c.cells();
    let value: f64 = cells
        .iter()
        .map(|&(a, b, p)| p * factorial_weight(a, b, m_a, m_b, d))
        .sum();
    let random_err = match c.shots() {
        Some(n) if n >= 2 => {
            let second: f64 = cells
                .iter()
                .map(|&(a, b, p)| p * factorial_weight(a, b, m_a, m_b, d).powi(2))
                .sum();
            let nf = n as f64;
            let var = (second - value * value).max(0.0) * nf / (nf - 1.0);
            (var / nf).sqrt()
        }
        _ => 0.0,
    };
    Ok(FactorialMomentEstimate {
        value,
        random_err,
        order: (m_a, m_b),
    })
}

/// Table of `M_{i,j}` values for one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorialMoments {
    d_bins: usize,
    values: BTreeMap<(usize, usize), f64>,
}

impl FactorialMoments {
    pub fn new(d_bins: usize) -> Self {
        FactorialMoments {
            d_bins,
            values: BTreeMap::new(),
        }
    }

    /// All orders with `i + j <= MAX_TOTAL_ORDER`.
    pub fn from_clicks(c: &impl ClickStatistics) -> Result<Self> {
        let d = c.d_bins();
        let mut out = FactorialMoments::new(d);
        for i in 0..=MAX_TOTAL_ORDER.min(d) {
            for j in 0..=(MAX_TOTAL_ORDER - i).min(d) {
                out.insert(i, j, factorial_moment(c, i, j)?.value);
            }
        }
        Ok(out)
    }

    pub fn d_bins(&self) -> usize {
        self.d_bins
    }

    pub fn insert(&mut self, m_a: usize, m_b: usize, value: f64) {
        self.values.insert((m_a, m_b), value);
    }

    /// `M_{m_a,m_b}`; orders beyond `D` vanish identically.
    pub fn get(&self, m_a: usize, m_b: usize) -> Result<f64> {
        if m_a > self.d_bins || m_b > self.d_bins {
            return Ok(0.0);
        }
        self.values
            .get(&(m_a, m_b))
            .copied()
            .ok_or(Error::MissingOrder(m_a, m_b))
    }
}

/// Leading-order bias estimate
/// `(D^{mA+mB}/2) [mA M_{mA+1,mB} + mB M_{mA,mB+1}]`.
///
/// This uses the saturated `D^{k} M_k` in place of the true normal-ordered
/// moment of the next order and therefore sits slightly below the actual
/// bias (by a relative `O(n/D)`); [`systematic_error`] corrects for that.
pub fn leading_systematic_error(m_set: &FactorialMoments, m_a: usize, m_b: usize) -> Result<f64> {
    if m_a == 0 && m_b == 0 {
        return Ok(0.0);
    }
    let d = m_set.d_bins() as f64;
    let scale = d.powi((m_a + m_b) as i32) / 2.0;
    let mut acc = 0.0;
    if m_a > 0 {
        acc += m_a as f64 * m_set.get(m_a + 1, m_b)?;
    }
    if m_b > 0 {
        acc += m_b as f64 * m_set.get(m_a, m_b + 1)?;
    }
    Ok(scale * acc)
}

/// Bound on `|<:n_A^mA n_B^mB:> - D^{mA+mB} M_{mA,mB}|`.
///
/// The bias is `[mA N_{mA+1,mB} + mB N_{mA,mB+1}]/(2D)` to leading order,
/// where `N` are normal-ordered moments. Each `N` of the next order is
/// itself estimated one level deeper, `N_{a,b} ~ D^{a+b} [M_{a,b} +
/// (a M_{a+1,b} + b M_{a,b+1})/2]`, which makes the interval cover the
/// click saturation of the next-order estimate.
pub fn systematic_error(m_set: &FactorialMoments, m_a: usize, m_b: usize) -> Result<f64> {
    if m_a == 0 && m_b == 0 {
        return Ok(0.0);
    }
    let d = m_set.d_bins() as f64;
    let upper = |a: usize, b: usize| -> Result<f64> {
        let mut v = m_set.get(a, b)?;
        if a > 0 {
            v += 0.5 * a as f64 * m_set.get(a + 1, b)?;
        }
        if b > 0 {
            v += 0.5 * b as f64 * m_set.get(a, b + 1)?;
        }
        Ok(v)
    };
    let mut acc = 0.0;
    if m_a > 0 {
        acc += m_a as f64 * upper(m_a + 1, m_b)?;
    }
    if m_b > 0 {
        acc += m_b as f64 * upper(m_a, m_b + 1)?;
    }
    Ok(d.powi((m_a + m_b) as i32) / 2.0 * acc)
}

/// Lowest-order photon moments from factorial moments:
/// `<n_A> ~ D M10`, `<n_A^2> ~ D^2 M20 + D M10`, `<n_A n_B> ~ D^2 M11`
/// (and likewise for B). `sys_err` is filled from [`systematic_error`].
pub fn moments_from_clicks(m_set: &FactorialMoments) -> Result<MomentSet> {
    let d = m_set.d_bins() as f64;
    let (m10, m01, m11) = (m_set.get(1, 0)?, m_set.get(0, 1)?, m_set.get(1, 1)?);
    let (m20, m02) = (m_set.get(2, 0)?, m_set.get(0, 2)?);
    let s10 = systematic_error(m_set, 1, 0)?;
    let s01 = systematic_error(m_set, 0, 1)?;
    let s20 = systematic_error(m_set, 2, 0)?;
    let s02 = systematic_error(m_set, 0, 2)?;
    let s11 = systematic_error(m_set, 1, 1)?;
    Ok(MomentSet {
        mean_a: d * m10,
        mean_b: d * m01,
        mean_a2: d * d * m20 + d * m10,
        mean_b2: d * d * m02 + d * m01,
        mean_ab: d * d * m11,
        random_cov: None,
        sys_err: Some([s10, s01, s20 + s10, s02 + s01, s11]),
        factorial_sys: Some([s10, s01, s20, s02, s11]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{photon_moments, JointNumberDistribution};

    /// Inclusion-exclusion oracle for the occupancy kernel.
    fn occupancy_closed_form(n: usize, d: usize) -> Vec<f64> {
        (0..=d)
            .map(|k| {
                let s: f64 = (0..=k)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(k, j) * ((k - j) as f64 / d as f64).powi(n as i32)
                    })
                    .sum();
                binomial(d, k) * s
            })
            .collect()
    }

    fn poisson_dist(mu_a: f64, mu_b: f64, n_max: usize) -> JointNumberDistribution {
        let pa = poisson_row(mu_a, n_max);
        let pb = poisson_row(mu_b, n_max);
        let probs = pa
            .iter()
            .flat_map(|x| pb.iter().map(move |y| x * y))
            .collect();
        JointNumberDistribution::new(n_max, probs).unwrap()
    }

    fn poisson_row(mu: f64, n_max: usize) -> Vec<f64> {
        let mut row = vec![(-mu).exp()];
        for n in 1..=n_max {
            let prev = row[n - 1];
            row.push(prev * mu / n as f64);
        }
        row
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(occupancy_kernel(0, 8).unwrap()[0], 1.0);
        let k1 = occupancy_kernel(1, 8).unwrap();
        assert_eq!(k1[1], 1.0);
        let k2 = occupancy_kernel(2, 8).unwrap();
        assert!((k2[1] - 1.0 / 8.0).abs() < 1e-16);
        assert!((k2[2] - 7.0 / 8.0).abs() < 1e-16);
        assert!(occupancy_kernel(3, 0).is_err());
    }

    #[test]
    fn kernel_matches_inclusion_exclusion() {
        for d in [1, 2, 4, 8, 16] {
            for n in 0..=40 {
                let dp = occupancy_kernel(n, d).unwrap();
                let cf = occupancy_closed_form(n, d);
                for k in 0..=d {
                    assert!((dp[k] - cf[k]).abs() < 1e-11, "n={n} d={d} k={k}");
                }
            }
        }
    }

    #[test]
    fn click_distribution_examples() {
        let vac = JointNumberDistribution::point(0, 0);
        let c = click_distribution(&vac, 8, 1e-12).unwrap();
        assert_eq!(c.get(0, 0), 1.0);

        let mut probs = vec![0.0; 9];
        probs[2 * 3] = 0.5;
        probs[2] = 0.5;
        let hom = JointNumberDistribution::new(2, probs).unwrap();
        let c = click_distribution(&hom, 8, 1e-12).unwrap();
        assert!((c.get(2, 0) - 7.0 / 16.0).abs() < 1e-15);
        assert!((c.get(1, 0) - 1.0 / 16.0).abs() < 1e-15);
        assert!((c.get(0, 2) - 7.0 / 16.0).abs() < 1e-15);
        assert!((c.get(0, 1) - 1.0 / 16.0).abs() < 1e-15);

        // coherent light: binomial(D, 1 - e^{-mu/D}) clicks per mode
        let (mu, d) = (0.7, 8usize);
        let c = click_distribution(&poisson_dist(mu, 0.0, 40), d, 1e-12).unwrap();
        let pc = 1.0 - (-mu / d as f64).exp();
        for k in 0..=d {
            let expected = binomial(d, k) * pc.powi(k as i32) * (1.0 - pc).powi((d - k) as i32);
            assert!((c.get(k, 0) - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn truncation_is_refused() {
        let probs = vec![0.25, 0.25, 0.25, 0.0];
        let d = JointNumberDistribution::new(1, probs).unwrap();
        assert!(matches!(
            click_distribution(&d, 8, 1e-10),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn factorial_moment_examples() {
        let vac = click_distribution(&JointNumberDistribution::point(0, 0), 8, 1e-12).unwrap();
        assert_eq!(factorial_moment(&vac, 0, 0).unwrap().value, 1.0);
        assert_eq!(factorial_moment(&vac, 1, 0).unwrap().value, 0.0);
        assert_eq!(factorial_moment(&vac, 2, 1).unwrap().value, 0.0);
        assert!(matches!(
            factorial_moment(&vac, 9, 0),
            Err(Error::OrderTooHigh { .. })
        ));

        let mu = 0.3;
        let c = click_distribution(&poisson_dist(mu, 0.0, 40), 8, 1e-14).unwrap();
        let x = 1.0 - (-mu / 8.0f64).exp();
        for m in 0..=4 {
            let v = factorial_moment(&c, m, 0).unwrap().value;
            assert!((v - x.powi(m as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_standard_error() {
        // half the shots single click, half nothing: weight k/D in {0, 1/8}
        let h = ClickHistogram::from_cells(8, 1, [(0, 0, 500), (1, 0, 500)]).unwrap();
        let est = factorial_moment(&h, 1, 0).unwrap();
        assert!((est.value - 0.0625).abs() < 1e-15);
        let sd = (0.0625f64.powi(2) * 1000.0 / 999.0).sqrt();
        assert!((est.random_err - sd / 1000f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn histogram_merge_is_associative() {
        let a = ClickHistogram::from_cells(4, 1, [(0, 0, 3), (1, 2, 1)]).unwrap();
        let b = ClickHistogram::from_cells(4, 2, [(1, 2, 5)]).unwrap();
        let c = ClickHistogram::from_cells(4, 3, [(4, 4, 2)]).unwrap();
        let mut ab_c = a.clone();
        ab_c.merge(&b).unwrap();
        ab_c.merge(&c).unwrap();
        let mut bc = b.clone();
        bc.merge(&c).unwrap();
        let mut a_bc = a.clone();
        a_bc.merge(&bc).unwrap();
        assert_eq!(ab_c, a_bc);
        assert_eq!(ab_c.total_shots(), 11);
        assert!(a.clone().merge(&ClickHistogram::empty(8, 0)).is_err());
    }

    #[test]
    fn moments_from_clicks_examples() {
        let mut zero = FactorialMoments::new(8);
        for i in 0..=4 {
            for j in 0..=4 - i {
                zero.insert(i, j, 0.0);
            }
        }
        let m = moments_from_clicks(&zero).unwrap();
        assert_eq!(m.values(), [0.0; 5]);
        assert_eq!(m.sys_err, Some([0.0; 5]));

        let c = click_distribution(&poisson_dist(0.02, 0.0, 20), 8, 1e-14).unwrap();
        let m = moments_from_clicks(&FactorialMoments::from_clicks(&c).unwrap()).unwrap();
        assert!((m.mean_a - 8.0 * (1.0 - (-0.0025f64).exp())).abs() < 1e-14);
        assert!((m.mean_a - 0.019975).abs() < 1e-6);

        let mut partial = FactorialMoments::new(8);
        partial.insert(1, 0, 0.1);
        assert_eq!(
            moments_from_clicks(&partial),
            Err(Error::MissingOrder(0, 1))
        );
    }

    #[test]
    fn systematic_error_examples() {
        let c = click_distribution(&JointNumberDistribution::point(0, 0), 8, 1e-12).unwrap();
        let f = FactorialMoments::from_clicks(&c).unwrap();
        assert_eq!(systematic_error(&f, 1, 0).unwrap(), 0.0);
        assert_eq!(systematic_error(&f, 0, 0).unwrap(), 0.0);

        let (mu, d) = (0.05, 8.0);
        let c = click_distribution(&poisson_dist(mu, 0.0, 20), 8, 1e-14).unwrap();
        let f = FactorialMoments::from_clicks(&c).unwrap();
        let leading = mu * mu / (2.0 * d);
        for s in [
            systematic_error(&f, 1, 0).unwrap(),
            leading_systematic_error(&f, 1, 0).unwrap(),
        ] {
            assert!((s / leading - 1.0).abs() < 0.01);
        }
        let mut sparse = FactorialMoments::new(8);
        sparse.insert(1, 0, 0.1);
        assert_eq!(
            systematic_error(&sparse, 1, 0),
            Err(Error::MissingOrder(2, 0))
        );
    }

    #[test]
    fn leading_term_alone_undershoots_coherent_bias() {
        // bias - leading = D x^3/3 + O(x^4) > 0 for coherent light, x = mu/D
        let (mu, d) = (0.4, 8usize);
        let c = click_distribution(&poisson_dist(mu, 0.0, 30), d, 1e-14).unwrap();
        let f = FactorialMoments::from_clicks(&c).unwrap();
        let est = moments_from_clicks(&f).unwrap();
        let bias = mu - est.mean_a;
        assert!(bias > leading_systematic_error(&f, 1, 0).unwrap());
        assert!(bias <= systematic_error(&f, 1, 0).unwrap());
    }

    #[test]
    fn bias_is_covered_for_low_intensity_states() {
        let fixtures = [
            poisson_dist(0.2, 0.3, 30),
            poisson_dist(0.01, 0.0, 20),
            JointNumberDistribution::point(1, 0),
            JointNumberDistribution::point(1, 1),
        ];
        for dist in fixtures.iter() {
            let exact = photon_moments(dist);
            let c = click_distribution(dist, 8, 1e-12).unwrap();
            let est = moments_from_clicks(&FactorialMoments::from_clicks(&c).unwrap()).unwrap();
            let sys = est.sys_err.unwrap();
            for i in 0..5 {
                let bias = (exact.values()[i] - est.values()[i]).abs();
                assert!(bias <= sys[i] + 1e-15, "component {i}: {bias} > {}", sys[i]);
            }
        }
    }
}
