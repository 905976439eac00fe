//! Composite Gauss–Legendre integration with panels graded toward r = 0,
//! tensor-product box rules, and truncated-integral probes.
//!
//! A piece of the interval that starts at 0 gets geometric panels
//! [bρ^{i+1}, bρ^i] and, below those, panels in the variable L = ln(1/r)
//! whose ends grow geometrically up to L = 700. Log-type integrands such as
//! r^{−1} L^{−3} are smooth and algebraically decaying in L, so they are
//! resolved there; everything below e^{−700} is dropped.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest L = ln(1/r) reached by the graded part of a mesh.
pub const LOG_FLOOR: f64 = 700.0;

/// Growth factor of panel ends in the L variable.
const LOG_PANEL_GROWTH: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadOptions {
    /// Relative agreement required between two successive levels.
    pub tol: f64,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Geometric grading ratio toward 0.
    pub grading_ratio: f64,
    /// Number of geometric panels before switching to the L variable.
    pub graded_panels: usize,
    /// Uniform panels per smooth piece at level 0.
    pub uniform_panels: usize,
    pub max_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-8,
            order: 8,
            grading_ratio: 0.5,
            graded_panels: 40,
            uniform_panels: 4,
            max_level: 6,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::out_of_range("tol", self.tol, "(0, 1)"));
        }
        if !(4..=64).contains(&self.order) {
            return Err(Error::out_of_range("panel order", self.order, "4..=64"));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::out_of_range(
                "grading ratio",
                self.grading_ratio,
                "(0, 1)",
            ));
        }
        if self.uniform_panels == 0 {
            return Err(Error::out_of_range("uniform panels", 0, ">= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    /// |I_ℓ − I_{ℓ−1}| for the accepted level ℓ.
    pub error_estimate: f64,
    pub refinement_level: u32,
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(z) and P_{n−1}(z) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

fn rule(order: usize) -> std::borrow::Cow<'static, (Vec<f64>, Vec<f64>)> {
    if order == 8 {
        std::borrow::Cow::Borrowed(gl8())
    } else {
        std::borrow::Cow::Owned(gauss_legendre(order))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PanelKind {
    /// Gauss nodes in r.
    Linear,
    /// Gauss nodes in L = ln(1/r); `a`, `b` are still r-values.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub kind: PanelKind,
}

/// Panels tiling an interval, graded toward 0 when the interval starts
/// there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedMesh {
    pub lo: f64,
    pub hi: f64,
    pub ratio: f64,
    pub order: usize,
    pub panels: Vec<Panel>,
}

impl GradedMesh {
    /// Mesh for [lo, hi] split at the interior `breakpoints`, refined
    /// `level` times.
    pub fn build(
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
        opts: &QuadOptions,
        level: u32,
    ) -> Result<Self> {
        opts.validate()?;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::out_of_range(
                "interval",
                format!("[{lo}, {hi}]"),
                "lo < hi, finite",
            ));
        }
        let mut cuts = vec![lo];
        let mut inner: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        cuts.extend(inner);
        cuts.push(hi);
        let split = 1usize << level;
        let mut panels = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == 0.0 {
                graded_piece(b, opts, split, &mut panels);
            } else if a > 0.0 && b / a > 4.0 {
                let count = ((b / a).log2().ceil() as usize).max(1) * split;
                let ratio = (b / a).powf(1.0 / count as f64);
                let mut x = a;
                for i in 0..count {
                    let next = if i + 1 == count { b } else { x * ratio };
                    panels.push(Panel {
                        a: x,
                        b: next,
                        kind: PanelKind::Linear,
                    });
                    x = next;
                }
            } else {
                uniform(a, b, opts.uniform_panels * split, &mut panels);
            }
        }
        Ok(GradedMesh {
            lo,
            hi,
            ratio: opts.grading_ratio,
            order: opts.order,
            panels,
        })
    }

    /// Quadrature nodes and weights, ascending panel order.
    pub fn nodes_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let gl = rule(self.order);
        let (gx, gw) = (&gl.0, &gl.1);
        let mut xs = Vec::with_capacity(self.panels.len() * gx.len());
        let mut ws = Vec::with_capacity(xs.capacity());
        for p in &self.panels {
            match p.kind {
                PanelKind::Linear => {
                    let (mid, half) = ((p.a + p.b) / 2.0, (p.b - p.a) / 2.0);
                    for (x, w) in gx.iter().zip(gw) {
                        xs.push(mid + half * x);
                        ws.push(half * w);
                    }
                }
                PanelKind::Log => {
                    let (la, lb) = (-p.b.ln(), -p.a.ln());
                    let (mid, half) = ((la + lb) / 2.0, (lb - la) / 2.0);
                    for (x, w) in gx.iter().zip(gw) {
                        let r = (-(mid + half * x)).exp();
                        xs.push(r);
                        ws.push(half * w * r);
                    }
                }
            }
        }
        (xs, ws)
    }
}

fn uniform(a: f64, b: f64, count: usize, out: &mut Vec<Panel>) {
    let h = (b - a) / count as f64;
    for i in 0..count {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == count { b } else { lo + h };
        out.push(Panel {
            a: lo,
            b: hi,
            kind: PanelKind::Linear,
        });
    }
}

fn graded_piece(b: f64, opts: &QuadOptions, split: usize, out: &mut Vec<Panel>) {
    let rho = opts.grading_ratio;
    let mut geo = Vec::new();
    let mut hi = b;
    // at least the configured count, and always far enough to have L > 1
    while geo.len() < opts.graded_panels || hi > 0.25 {
        let lo = hi * rho;
        geo.push((lo, hi));
        hi = lo;
    }
    let mut l = -hi.ln();
    let mut log_part = Vec::new();
    while l < LOG_FLOOR {
        let next = (l * LOG_PANEL_GROWTH).min(LOG_FLOOR);
        log_part.push((l, next));
        l = next;
    }
    for &(la, lb) in log_part.iter().rev() {
        for s in (0..split).rev() {
            let l0 = la + (lb - la) * s as f64 / split as f64;
            let l1 = la + (lb - la) * (s + 1) as f64 / split as f64;
            out.push(Panel {
                a: (-l1).exp(),
                b: (-l0).exp(),
                kind: PanelKind::Log,
            });
        }
    }
    for &(lo, hi) in geo.iter().rev() {
        uniform(lo, hi, split, out);
    }
}

/// Runs `eval(level)` for successive levels until two agree within `tol`.
pub fn refine_until_converged<F>(opts: &QuadOptions, mut eval: F) -> Result<IntegralResult>
where
    F: FnMut(u32) -> Result<f64>,
{
    refine_with_magnitude(opts, |level| eval(level).map(|v| (v, v.abs())))
}

/// Like [`refine_until_converged`], but `eval` also returns ∫|g|. Changes
/// at roundoff level relative to that magnitude count as converged, so
/// integrands whose signed integral cancels to zero still terminate.
pub fn refine_with_magnitude<F>(opts: &QuadOptions, mut eval: F) -> Result<IntegralResult>
where
    F: FnMut(u32) -> Result<(f64, f64)>,
{
    const ROUNDOFF: f64 = 1e3 * f64::EPSILON;
    opts.validate()?;
    let (mut prev, _) = eval(0)?;
    for level in 1..=opts.max_level {
        let (cur, mag) = eval(level)?;
        if !cur.is_finite() {
            return Err(Error::NonConvergence {
                levels: level,
                previous: prev,
                last: cur,
            });
        }
        let err = (cur - prev).abs();
        if err <= opts.tol * cur.abs() || err <= ROUNDOFF * mag || (cur == 0.0 && prev == 0.0) {
            return Ok(IntegralResult {
                value: cur,
                error_estimate: err,
                refinement_level: level,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        levels: opts.max_level,
        previous: prev,
        last: eval(opts.max_level)?.0,
    })
}

/// r^γ·g without overflow when r^γ is huge and g tiny.
pub fn weighted(g: f64, gamma: f64, r: f64) -> f64 {
    if g == 0.0 {
        return 0.0;
    }
    if gamma == 0.0 {
        return g;
    }
    g.signum() * (g.abs().ln() + gamma * r.ln()).exp()
}

/// ∫ r^γ g(r) dr over `interval`, split at `breakpoints`.
pub fn integrate_weighted_1d_with<G>(
    g: G,
    gamma: f64,
    interval: (f64, f64),
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<IntegralResult>
where
    G: Fn(f64) -> f64 + Sync,
{
    let (lo, hi) = interval;
    if lo < 0.0 && gamma.fract() != 0.0 {
        return Err(Error::out_of_range(
            "interval start",
            lo,
            ">= 0 for fractional weights",
        ));
    }
    if lo == 0.0 && gamma <= -1.0 {
        return Err(Error::out_of_range(
            "gamma",
            gamma,
            "> -1 when the interval touches 0",
        ));
    }
    refine_with_magnitude(opts, |level| {
        let mesh = GradedMesh::build(lo, hi, breakpoints, opts, level)?;
        let (xs, ws) = mesh.nodes_weights();
        let vals: Vec<f64> = xs.par_iter().map(|&r| weighted(g(r), gamma, r)).collect();
        let signed = vals.iter().zip(&ws).map(|(v, w)| v * w).sum();
        let mag = vals.iter().zip(&ws).map(|(v, w)| (v * w).abs()).sum();
        Ok((signed, mag))
    })
}

pub fn integrate_weighted_1d<G>(
    g: G,
    gamma: f64,
    interval: (f64, f64),
    opts: &QuadOptions,
) -> Result<IntegralResult>
where
    G: Fn(f64) -> f64 + Sync,
{
    integrate_weighted_1d_with(g, gamma, interval, &[], opts)
}

/// ∫_box x_n^γ g(x) dx by a tensor product of per-axis meshes.
pub fn integrate_box_with<G>(
    g: G,
    gamma: f64,
    bx: &[(f64, f64)],
    breakpoints: &[Vec<f64>],
    opts: &QuadOptions,
) -> Result<IntegralResult>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let n = bx.len();
    if !(1..=3).contains(&n) {
        return Err(Error::out_of_range("box dimension", n, "1..=3"));
    }
    if !breakpoints.is_empty() && breakpoints.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: breakpoints.len(),
        });
    }
    if bx[n - 1].0 == 0.0 && gamma <= -1.0 {
        return Err(Error::out_of_range(
            "gamma",
            gamma,
            "> -1 when the box touches x_n = 0",
        ));
    }
    let empty: Vec<f64> = Vec::new();
    refine_until_converged(opts, |level| {
        let axes = bx
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let br = breakpoints.get(i).unwrap_or(&empty);
                GradedMesh::build(lo, hi, br, opts, level).map(|m| m.nodes_weights())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(tensor_sum(&axes, |x| weighted(g(x), gamma, x[n - 1])))
    })
}

pub fn integrate_box<G>(
    g: G,
    gamma: f64,
    bx: &[(f64, f64)],
    opts: &QuadOptions,
) -> Result<IntegralResult>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    integrate_box_with(g, gamma, bx, &[], opts)
}

/// Tensor-product sum; the first axis is split across threads and the
/// per-node partial sums are added in index order.
pub(crate) fn tensor_sum<F>(axes: &[(Vec<f64>, Vec<f64>)], f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    tensor_sum_indexed(axes, |_, x| f(x))
}

/// Like [`tensor_sum`] but the callback also sees the node index per axis.
pub(crate) fn tensor_sum_indexed<F>(axes: &[(Vec<f64>, Vec<f64>)], f: F) -> f64
where
    F: Fn(&[usize], &[f64]) -> f64 + Sync,
{
    let n = axes.len();
    let (x0, w0) = &axes[0];
    let partial: Vec<f64> = (0..x0.len())
        .into_par_iter()
        .map(|i| {
            let mut point = vec![0.0; n];
            let mut idx = vec![0usize; n];
            point[0] = x0[i];
            idx[0] = i;
            w0[i] * inner_sum(axes, &mut idx, &mut point, 1, &f)
        })
        .collect();
    partial.iter().sum()
}

fn inner_sum<F>(
    axes: &[(Vec<f64>, Vec<f64>)],
    idx: &mut [usize],
    point: &mut [f64],
    depth: usize,
    f: &F,
) -> f64
where
    F: Fn(&[usize], &[f64]) -> f64,
{
    if depth == axes.len() {
        return f(idx, point);
    }
    let (xs, ws) = &axes[depth];
    let mut acc = 0.0;
    for (k, (x, w)) in xs.iter().zip(ws).enumerate() {
        point[depth] = *x;
        idx[depth] = k;
        acc += w * inner_sum(axes, idx, point, depth + 1, f);
    }
    acc
}

/// Truncated integrals ∫_ε^b r^γ g(r) dr for each ε in a strictly
/// decreasing grid. Never claims convergence; each segment between
/// successive ε is integrated to `opts.tol` and the pieces accumulate.
pub fn divergence_probe<G>(
    g: G,
    gamma: f64,
    b: f64,
    eps_grid: &[f64],
    opts: &QuadOptions,
) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64) -> f64 + Sync,
{
    divergence_probe_with(g, gamma, b, eps_grid, &[], opts)
}

pub fn divergence_probe_with<G>(
    g: G,
    gamma: f64,
    b: f64,
    eps_grid: &[f64],
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64) -> f64 + Sync,
{
    if eps_grid.is_empty() {
        return Err(Error::EmptyInput("eps grid"));
    }
    if eps_grid.windows(2).any(|w| !(w[1] < w[0]))
        || eps_grid[0] >= b
        || eps_grid[eps_grid.len() - 1] <= 0.0
    {
        return Err(Error::out_of_range(
            "eps grid",
            format!("{eps_grid:?}"),
            "strictly decreasing, inside (0, b)",
        ));
    }
    let mut out = Vec::with_capacity(eps_grid.len());
    let mut upper = b;
    let mut total = 0.0;
    for &eps in eps_grid {
        let piece = integrate_weighted_1d_with(&g, gamma, (eps, upper), breakpoints, opts)?;
        total += piece.value;
        out.push((eps, total));
        upper = eps;
    }
    Ok(out)
}
