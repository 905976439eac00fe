//! Polynomial blend S with S = 0 on (−∞,0], S = 1 on [1,∞) and C^K joins.

use std::sync::OnceLock;

use super::poly_derivative;

/// S as a polynomial in σ = 2t − 1. The integrand t^K(1−t)^K equals
/// ((1−σ²)/4)^K, so S − 1/2 is odd in σ with modest coefficients.
fn coefficients(k: usize) -> Vec<f64> {
    let mut c = vec![0.0; 2 * k + 2];
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * j + 1] = sign * binom / (2 * j + 1) as f64;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    // normalize so that S(σ = 1) − S(σ = −1) = 1
    let total: f64 = 2.0 * c.iter().sum::<f64>();
    c.iter_mut().for_each(|v| *v /= total);
    c[0] = 0.5;
    c
}

fn cached(k: usize) -> &'static [f64] {
    static SIX: OnceLock<Vec<f64>> = OnceLock::new();
    assert_eq!(k, 6, "only the C^6 blend is tabulated");
    SIX.get_or_init(|| coefficients(6))
}

/// S^{(order)}(t).
pub(crate) fn eval(k: usize, order: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    2f64.powi(order as i32) * poly_derivative(cached(k), order, 2.0 * t - 1.0)
}
