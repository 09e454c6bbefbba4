//! Small combinatorial helpers shared by the photon-number and click models.

/// `ln(n!)` for `n = 0..=n_max`.
pub(crate) fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// Binomial pmf row `P(j | n, eta)` for `j = 0..=n`.
pub(crate) fn binomial_pmf_row(n: usize, eta: f64, ln_fact: &[f64]) -> Vec<f64> {
    if eta <= 0.0 {
        let mut row = vec![0.0; n + 1];
        row[0] = 1.0;
        return row;
    }
    if eta >= 1.0 {
        let mut row = vec![0.0; n + 1];
        row[n] = 1.0;
        return row;
    }
    let (ln_p, ln_q) = (eta.ln(), (1.0 - eta).ln());
    (0..=n)
        .map(|j| {
            (ln_fact[n] - ln_fact[j] - ln_fact[n - j] + j as f64 * ln_p + (n - j) as f64 * ln_q)
                .exp()
        })
        .collect()
}
