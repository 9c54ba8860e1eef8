//! Small statistical helpers: the standard normal tail and the
//! Benjamini-Hochberg adjustment.

/// Standard normal CDF, via the complementary error function. Good to about
/// 1e-15 absolute over the whole line.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper-tail p-value `1 - Phi(t)` of a standard normal.
pub fn p_value(t: f64) -> f64 {
    0.5 * libm::erfc(t / std::f64::consts::SQRT_2)
}

/// Benjamini-Hochberg adjusted p-values, in the input's order.
///
/// The adjusted value for the i-th smallest p is
/// `min_{j >= i} (m * p_(j) / j)` capped at 1, the step-up form that makes
/// "adjusted p <= alpha" equivalent to BH rejection at level alpha.
pub fn bh_adjust(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap());
    let mut adjusted = vec![0.0; m];
    let mut running_min = 1.0f64;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let scaled = (p[idx] * m as f64 / (rank + 1) as f64).min(1.0);
        running_min = running_min.min(scaled);
        adjusted[idx] = running_min;
    }
    adjusted
}
