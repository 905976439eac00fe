//! Finite-difference cross-checks for the analytic derivatives.

use super::Separable;
use crate::error::{Error, Result};

/// Fornberg weights for the derivatives of orders 0..=max_deriv at `z`
/// from values at `nodes`. Returns `w[d][i]`.
pub fn central_weights(z: f64, nodes: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    /// Stencil half-width; the first-derivative stencil has 2·half+1 points.
    pub half_width: usize,
    /// Upper bound on the step.
    pub max_step: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            half_width: 8,
            max_step: 0.05,
        }
    }
}

/// All multi-indices of length n with total order `order`.
pub(crate) fn multi_indices(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    if n > 0 {
        rec(0, order, &mut cur, &mut out);
    }
    out
}

/// Worst relative gap between analytic partials of total order `order` and
/// finite differences at `points`.
///
/// Each partial ∂^β is compared with a one-step central difference of the
/// analytic ∂^{β−e_i}, so checking orders 1..=k in turn validates the whole
/// chain back to the function values. The gap is measured against the
/// largest magnitude seen, either an analytic partial or the sum of the
/// absolute stencil contributions (which keeps vanishing partials sane).
pub fn derivative_self_check<F: Separable + ?Sized>(
    f: &F,
    order: u32,
    points: &[Vec<f64>],
) -> Result<f64> {
    derivative_self_check_with(f, order, points, FdOptions::default())
}

pub fn derivative_self_check_with<F: Separable + ?Sized>(
    f: &F,
    order: u32,
    points: &[Vec<f64>],
    opts: FdOptions,
) -> Result<f64> {
    let n = f.dim();
    if order > f.max_order() {
        return Err(Error::out_of_range("order", order, "<= max_order"));
    }
    if order == 0 {
        return Ok(0.0);
    }
    let breaks: Vec<Vec<f64>> = (0..n).map(|i| f.axis_breakpoints(i)).collect();
    let half = opts.half_width.max(1);
    let mut worst_gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in points {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        if !(x[n - 1] > 0.0) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideDomain { point: x.clone() });
        }
        for beta in multi_indices(n, order) {
            let axis = beta.iter().rposition(|&b| b > 0).expect("order > 0");
            let dist = breaks[axis]
                .iter()
                .map(|b| (x[axis] - b).abs())
                .fold(f64::INFINITY, f64::min);
            if dist == 0.0 {
                return Err(Error::OutsideDomain { point: x.clone() });
            }
            // keep the whole stencil well inside the smooth piece around x
            let h = (0.1 * dist / half as f64).min(opts.max_step);
            let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64).collect();
            let w = central_weights(0.0, &nodes, 1);
            let mut lower = beta.clone();
            lower[axis] -= 1;
            let mut y = x.clone();
            let mut fd = 0.0;
            let mut magnitude = 0.0;
            for (k, wk) in nodes.iter().zip(&w[1]) {
                if *wk == 0.0 {
                    continue;
                }
                y[axis] = x[axis] + k * h;
                let term = wk * f.partial(&lower, &y);
                fd += term;
                magnitude += term.abs();
            }
            fd /= h;
            let exact = f.partial(&beta, x);
            scale = scale.max(exact.abs()).max(magnitude / h);
            worst_gap = worst_gap.max((exact - fd).abs());
        }
    }
    if worst_gap == 0.0 {
        return Ok(0.0);
    }
    Ok(worst_gap / scale.max(f64::MIN_POSITIVE))
}
