//! Scaling counterexamples and the critical-weight / canceling
//! demonstrations, all reported as data rather than pass/fail numbers.

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{make_log_family_with_power, tensorize, Separable, TrialFunctionND};
use crate::inequalities::{case_sides, validate_params, CaseId, InequalityCase, NormValue};
use crate::norms::{pointwise_integrand, seminorm_integral, Domain};
use crate::quadrature::{divergence_probe_with, IntegralResult, QuadOptions};
use crate::rational::{int, to_f64, Rational};

/// Which scaling construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    /// Bump concentrating at an interior point, d roughly constant.
    Prop32,
    /// Bump concentrating at a boundary point, d = x_n.
    Prop33,
}

impl Setting {
    /// Name of the hypothesis whose failure this construction exposes.
    pub fn condition(&self) -> &'static str {
        match self {
            Setting::Prop32 => "pq",
            Setting::Prop33 => "r",
        }
    }
}

/// Growth exponents in λ of the top-order left term and of the dominant
/// right term.
pub fn predicted_exponents(case: &InequalityCase, which: Setting) -> Result<(Rational, Rational)> {
    if case.id != CaseId::MainThm {
        return Err(Error::Hypothesis(format!(
            "scaling exponents need a MainThm case, got {:?}",
            case.id
        )));
    }
    let missing = |name: &str| Error::Hypothesis(format!("missing parameter {name}"));
    let n = int(case.n.ok_or_else(|| missing("n"))? as i64);
    let m = int(case.m.ok_or_else(|| missing("m"))? as i64);
    let k = int(case.k.ok_or_else(|| missing("k"))? as i64);
    let p = case.p.clone().ok_or_else(|| missing("p"))?;
    let q = case.q.clone().ok_or_else(|| missing("q"))?;
    let r = case.r.clone().ok_or_else(|| missing("r"))?;
    Ok(match which {
        Setting::Prop32 => (&k - &n / &q, &m - &n / &p),
        Setting::Prop33 => {
            let one = Rational::one();
            (-&r / &q + &m - &n / &q, &m - &one + (&one - &n) / &p)
        }
    })
}

/// Least-squares line through (ln x, ln y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 4 {
        return Err(Error::out_of_range("fit points", xs.len(), ">= 4"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Degenerate("log-log fit needs positive finite data"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    /// Full left norm.
    pub lhs: f64,
    /// Full right norm.
    pub rhs: f64,
    pub ratio: f64,
    /// Order-k part of the left norm.
    pub lhs_top: f64,
    /// Order-m part of the right norm.
    pub rhs_top: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingExperiment {
    pub case: InequalityCase,
    pub setting: Setting,
    pub trial: String,
    pub lambda_grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub predicted_lhs_exponent: f64,
    pub predicted_rhs_exponent: f64,
    /// Fits of the top-order terms, which scale exactly as predicted.
    pub lhs_fit: SlopeFit,
    pub rhs_fit: SlopeFit,
    /// Fit of the full-norm ratio.
    pub ratio_fit: SlopeFit,
    pub slope_tolerance: f64,
    pub slopes_match: bool,
    /// Observed: the full ratio grows with λ.
    pub blow_up: bool,
    /// The exposed hypothesis fails for this case.
    pub condition_violated: bool,
    /// `blow_up == condition_violated`.
    pub verdict_matches: bool,
}

impl ScalingExperiment {
    /// Relative slope tolerance used by [`scaling_sweep`].
    pub const SLOPE_TOL: f64 = 0.02;

    /// (λ, lhs, rhs, ratio) rows for plotting.
    pub fn rows(&self) -> Vec<[f64; 4]> {
        self.points
            .iter()
            .map(|p| [p.lambda, p.lhs, p.rhs, p.ratio])
            .collect()
    }
}

fn slope_close(fit: f64, pred: f64) -> bool {
    (fit - pred).abs() <= ScalingExperiment::SLOPE_TOL * pred.abs().max(1.0)
}

fn root(r: &IntegralResult, p: f64) -> f64 {
    r.value.max(0.0).powf(1.0 / p)
}

fn sweep_point(
    case: &InequalityCase,
    u: &TrialFunctionND,
    lambda: f64,
    opts: &QuadOptions,
) -> Result<SweepPoint> {
    let domain = case.domain();
    let m = case.m.unwrap_or(0);
    let k = case.k.unwrap_or(0);
    let p = to_f64(case.p.as_ref().expect("validated"));
    let q = to_f64(case.q.as_ref().expect("validated"));
    let r = to_f64(case.r.as_ref().expect("validated"));
    let mut lhs = 0.0;
    let mut lhs_top = 0.0;
    for j in 0..=k {
        let v = root(&seminorm_integral(u, j, q, r, m - k, domain, opts)?, q);
        lhs += v;
        if j == k {
            lhs_top = v;
        }
    }
    let mut rhs = 0.0;
    let mut rhs_top = 0.0;
    for j in 0..=m {
        let v = root(&seminorm_integral(u, j, p, p - 1.0, 0, domain, opts)?, p);
        rhs += v;
        if j == m {
            rhs_top = v;
        }
    }
    Ok(SweepPoint {
        lambda,
        lhs,
        rhs,
        ratio: lhs / rhs,
        lhs_top,
        rhs_top,
    })
}

/// Evaluates the case on u_λ for every λ and fits log-log slopes.
///
/// `Prop33` uses u_λ(x) = u(λx); `Prop32` dilates about the centre of the
/// support box of `u`, which should sit away from the boundary.
pub fn scaling_sweep(
    case: &InequalityCase,
    which: Setting,
    u: &TrialFunctionND,
    lambda_grid: &[f64],
    opts: &QuadOptions,
) -> Result<ScalingExperiment> {
    let (pl, pr) = predicted_exponents(case, which)?;
    let verdict = validate_params(case);
    if let Some(miss) = verdict.violated.iter().find(|v| v.starts_with("missing_")) {
        return Err(Error::Hypothesis(miss.clone()));
    }
    if lambda_grid.len() < 4 {
        return Err(Error::out_of_range(
            "lambda grid length",
            lambda_grid.len(),
            ">= 4",
        ));
    }
    if lambda_grid[0] <= 1.0 || lambda_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::out_of_range(
            "lambda grid",
            format!("{lambda_grid:?}"),
            "strictly increasing, > 1",
        ));
    }
    if u.is_zero() {
        return Err(Error::Degenerate("zero trial function"));
    }
    if case.n.map(|n| n as usize) != Some(u.dim()) {
        return Err(Error::DimensionMismatch {
            expected: case.n.unwrap_or(0) as usize,
            got: u.dim(),
        });
    }
    let center: Vec<f64> = u.support_box().iter().map(|(a, b)| 0.5 * (a + b)).collect();
    // unit height at the centre, otherwise |u|^q underflows for large q
    let peak = u.value(&center).abs();
    let u = if peak > 0.0 && peak.is_finite() {
        u.times(1.0 / peak)
    } else {
        u.clone()
    };
    let results: Vec<Result<SweepPoint>> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let ul = match which {
                Setting::Prop33 => u.scale(lambda)?,
                Setting::Prop32 => u.scale_about(lambda, &center)?,
            };
            sweep_point(case, &ul, lambda, opts)
        })
        .collect();
    let mut points = Vec::with_capacity(results.len());
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok(pt) => points.push(pt),
            Err(e) => {
                return Err(Error::SweepFailed {
                    largest_reliable_lambda: (i > 0).then(|| lambda_grid[i - 1]),
                    cause: Box::new(e),
                })
            }
        }
    }
    let lam: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let col = |f: fn(&SweepPoint) -> f64| points.iter().map(f).collect::<Vec<f64>>();
    let lhs_fit = fit_loglog(&lam, &col(|p| p.lhs_top))?;
    let rhs_fit = fit_loglog(&lam, &col(|p| p.rhs_top))?;
    let ratio_fit = fit_loglog(&lam, &col(|p| p.ratio))?;
    let (pl, pr) = (to_f64(&pl), to_f64(&pr));
    let slopes_match = slope_close(lhs_fit.slope, pl) && slope_close(rhs_fit.slope, pr);
    let blow_up = ratio_fit.slope > ScalingExperiment::SLOPE_TOL;
    let condition_violated = verdict.violated.iter().any(|v| v == which.condition());
    Ok(ScalingExperiment {
        case: case.clone(),
        setting: which,
        trial: u.describe(),
        lambda_grid: lambda_grid.to_vec(),
        points,
        predicted_lhs_exponent: pl,
        predicted_rhs_exponent: pr,
        lhs_fit,
        rhs_fit,
        ratio_fit,
        slope_tolerance: ScalingExperiment::SLOPE_TOL,
        slopes_match,
        blow_up,
        condition_violated,
        verdict_matches: blow_up == condition_violated,
    })
}

/// Growth class of a truncated-integral sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    Bounded,
    Unbounded,
    Undetermined,
}

/// Thresholds for [`classify_growth`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceRule {
    /// Each of the last `window` relative increments at least this → unbounded.
    pub grow_min: f64,
    /// Each of the last `window` relative increments below this → bounded.
    pub settle_max: f64,
    pub window: usize,
    /// Fallback: increments decaying like L^{−s} in L = ln(1/ε) with
    /// s ≤ this are unbounded.
    pub critical_decay: f64,
}

impl Default for DivergenceRule {
    fn default() -> Self {
        DivergenceRule {
            grow_min: 0.05,
            settle_max: 0.005,
            window: 3,
            critical_decay: 1.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub class: Growth,
    /// Verdict of the relative-increment thresholds alone.
    pub increment_rule: Growth,
    pub relative_increments: Vec<f64>,
    /// Local exponent s of the increments, modelled as ∫ L^{−s} dL.
    pub decay_exponent: Option<f64>,
}

/// ∫_{L0}^{L1} L^{−s} dL.
fn power_segment(l0: f64, l1: f64, s: f64) -> f64 {
    let a = 1.0 - s;
    let span = (l1 / l0).ln();
    if a.abs() < 1e-12 {
        span
    } else {
        l0.powf(a) * (a * span).exp_m1() / a
    }
}

/// Exponent s with segment(b)/segment(a) equal to `ratio`, by bisection.
fn decay_exponent(seg_a: (f64, f64), seg_b: (f64, f64), ratio: f64) -> f64 {
    let model = |s: f64| power_segment(seg_b.0, seg_b.1, s) / power_segment(seg_a.0, seg_a.1, s);
    let (mut lo, mut hi) = (-50.0, 50.0);
    if ratio >= model(lo) {
        return lo;
    }
    if ratio <= model(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model(mid) > ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Classifies a probe sequence (ε decreasing, cumulative values).
///
/// The class comes from the decay exponent of the last `window`
/// increments in L = ln(1/ε): s ≤ `critical_decay` means unbounded.
/// Exactly flat tails are bounded. The relative-increment verdict is
/// reported alongside.
pub fn classify_growth(probe: &[(f64, f64)], rule: &DivergenceRule) -> Result<GrowthReport> {
    let w = rule.window.max(2);
    if probe.len() < w + 1 {
        return Err(Error::out_of_range("probe length", probe.len(), "> window"));
    }
    if probe.iter().any(|&(e, _)| !(e > 0.0 && e < 1.0)) {
        return Err(Error::out_of_range(
            "probe eps",
            "outside (0,1)",
            "inside (0, 1)",
        ));
    }
    let vals: Vec<f64> = probe.iter().map(|p| p.1.abs()).collect();
    let incs: Vec<f64> = vals.windows(2).map(|v| (v[1] - v[0]).abs()).collect();
    let rel: Vec<f64> = vals
        .windows(2)
        .map(|v| {
            if v[0] > 0.0 {
                (v[1] - v[0]).abs() / v[0]
            } else if v[1] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    let tail = &rel[rel.len() - w..];
    let increment_rule = if tail.iter().all(|&r| r >= rule.grow_min) {
        Growth::Unbounded
    } else if tail.iter().all(|&r| r < rule.settle_max) {
        Growth::Bounded
    } else {
        Growth::Undetermined
    };
    let ls: Vec<f64> = probe.iter().map(|p| -p.0.ln()).collect();
    let n = incs.len();
    let mut est = Vec::new();
    for i in n - w..n - 1 {
        let (a, b) = (incs[i], incs[i + 1]);
        if a == 0.0 {
            continue;
        }
        est.push(decay_exponent(
            (ls[i], ls[i + 1]),
            (ls[i + 1], ls[i + 2]),
            b / a,
        ));
    }
    let flat = tail.iter().all(|&r| r < 1e-12);
    let (class, decay) = if flat {
        (Growth::Bounded, None)
    } else if est.is_empty() {
        (Growth::Undetermined, None)
    } else {
        let s = est.iter().sum::<f64>() / est.len() as f64;
        let class = if s <= rule.critical_decay {
            Growth::Unbounded
        } else {
            Growth::Bounded
        };
        (class, Some(s))
    };
    Ok(GrowthReport {
        class,
        increment_rule,
        relative_increments: rel,
        decay_exponent: decay,
    })
}

/// Probe of ∫_ε d^w |∇^j(u/d^M)|^p on a one-dimensional function.
fn probe_term(
    u: &TrialFunctionND,
    j: u32,
    p: f64,
    w: f64,
    big_m: u32,
    eps_grid: &[f64],
    opts: &QuadOptions,
) -> Result<Vec<(f64, f64)>> {
    let (_, b) = u.support_box()[0];
    let breaks = u.axis_breakpoints(0);
    divergence_probe_with(
        |r| pointwise_integrand(u, j, p, w, big_m, &[r]),
        0.0,
        b,
        eps_grid,
        &breaks,
        opts,
    )
}

/// The ε-decade grid 10^{−from} .. 10^{−to}.
pub fn decade_grid(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRow {
    pub alpha_log: f64,
    /// Whether ∫ r^{−1} log^{−p α_log}(1/r) diverges, i.e. p·α_log ≤ 1.
    pub oracle_divergent: bool,
    pub numerator_probe: Vec<(f64, f64)>,
    pub numerator: GrowthReport,
    pub denominator: f64,
    pub denominator_terms: Vec<GrowthReport>,
    /// (ε, truncated numerator norm / denominator).
    pub ratios: Vec<(f64, f64)>,
    pub matches_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalDemo {
    pub p: f64,
    pub eps_cut: f64,
    pub eps_grid: Vec<f64>,
    pub rule: DivergenceRule,
    pub rows: Vec<CriticalRow>,
}

/// First-order inequality at the critical weight d^{p−1} on (0, 1), tested
/// with u = log^{−α}(1/r) near 0.
pub fn critical_failure_demo(
    p: f64,
    alpha_log_grid: &[f64],
    eps_cut: f64,
    eps_grid: &[f64],
    rule: &DivergenceRule,
    opts: &QuadOptions,
) -> Result<CriticalDemo> {
    if !(p >= 1.0) {
        return Err(Error::out_of_range("p", p, "[1, inf)"));
    }
    if alpha_log_grid.is_empty() {
        return Err(Error::EmptyInput("alpha_log grid"));
    }
    let w = p - 1.0;
    let rows = alpha_log_grid
        .par_iter()
        .map(|&alpha| {
            let u = tensorize(make_log_family_with_power(alpha, eps_cut, 0)?, vec![], 1)?;
            let numerator_probe = probe_term(&u, 0, p, w, 1, eps_grid, opts)?;
            let numerator = classify_growth(&numerator_probe, rule)?;
            let mut denominator = 0.0;
            let mut denominator_terms = Vec::new();
            for j in 0..=1 {
                let full = seminorm_integral(&u, j, p, w, 0, Domain::Interval, opts)?;
                denominator += root(&full, p);
                denominator_terms.push(classify_growth(
                    &probe_term(&u, j, p, w, 0, eps_grid, opts)?,
                    rule,
                )?);
            }
            let ratios = numerator_probe
                .iter()
                .map(|&(e, v)| (e, v.max(0.0).powf(1.0 / p) / denominator))
                .collect();
            let oracle_divergent = p * alpha <= 1.0;
            let expected = if oracle_divergent {
                Growth::Unbounded
            } else {
                Growth::Bounded
            };
            let matches_oracle = numerator.class == expected
                && denominator_terms.iter().all(|t| t.class == Growth::Bounded);
            Ok(CriticalRow {
                alpha_log: alpha,
                oracle_divergent,
                numerator_probe,
                numerator,
                denominator,
                denominator_terms,
                ratios,
                matches_oracle,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriticalDemo {
        p,
        eps_cut,
        eps_grid: eps_grid.to_vec(),
        rule: *rule,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub name: String,
    pub probe: Vec<(f64, f64)>,
    pub growth: GrowthReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancelingReport {
    pub p: f64,
    pub m: u32,
    pub k: u32,
    pub alpha_log: f64,
    pub eps_cut: f64,
    /// ‖∇^k(u/d^{m−k})‖ in L^p(d^{p−1}).
    pub quotient_term: TermReport,
    /// ‖∇^{k−i}u / d^{m−k+i}‖ for i = 0..=k.
    pub expanded_terms: Vec<TermReport>,
    /// Converged value of the quotient term at two tolerances.
    pub quotient_value: (f64, f64),
    /// Full ratio on u itself.
    pub bounded_ratio: f64,
    pub divergent_terms: Vec<String>,
    /// The quotient term stays bounded while some expanded term diverges.
    pub lossy: bool,
}

/// Log-family trial r^{m−1}·log^{−α}(1/r) with the smooth cutoff.
pub fn canceling_trial(m: u32, alpha_log: f64, eps_cut: f64) -> Result<TrialFunctionND> {
    tensorize(
        make_log_family_with_power(alpha_log, eps_cut, m as i32 - 1)?,
        vec![],
        1,
    )
}

/// The one-dimensional quotient case ‖u/d^{m−k}‖_{W^{k,p}(d^{p−1})} over
/// ‖u‖_{W^{m,p}(d^{p−1})} on the interval.
pub fn canceling_case(p: &Rational, m: u32, k: u32) -> InequalityCase {
    if m == 2 && k == 1 {
        InequalityCase::second(p.clone())
    } else {
        InequalityCase::main_thm(1, m, k, p.clone(), p.clone(), p - Rational::one())
            .with_domain(Domain::Interval)
    }
}

fn ratio_of(case: &InequalityCase, u: &TrialFunctionND, opts: &QuadOptions) -> Result<f64> {
    let (l, r): (NormValue, NormValue) = case_sides(case, u, opts)?;
    if r.value > 0.0 {
        Ok(l.value / r.value)
    } else {
        Err(Error::Degenerate("right side vanishes"))
    }
}

#[allow(clippy::too_many_arguments)]
pub fn canceling_demo(
    p: &Rational,
    m: u32,
    k: u32,
    alpha_log: f64,
    eps_cut: f64,
    eps_grid: &[f64],
    rule: &DivergenceRule,
    opts: &QuadOptions,
) -> Result<CancelingReport> {
    if m < 2 || k == 0 || k >= m {
        return Err(Error::Hypothesis(format!(
            "need m >= 2 and 1 <= k <= m-1, got m={m}, k={k}"
        )));
    }
    let pf = to_f64(p);
    let w = pf - 1.0;
    let u = canceling_trial(m, alpha_log, eps_cut)?;
    let probe = probe_term(&u, k, pf, w, m - k, eps_grid, opts)?;
    let quotient_term = TermReport {
        name: format!("grad^{k}(u/d^{})", m - k),
        growth: classify_growth(&probe, rule)?,
        probe,
    };
    let mut expanded_terms = Vec::new();
    for i in 0..=k {
        let probe = probe_term(
            &u,
            k - i,
            pf,
            w - pf * (m - k + i) as f64,
            0,
            eps_grid,
            opts,
        )?;
        expanded_terms.push(TermReport {
            name: format!("|grad^{} u|/d^{}", k - i, m - k + i),
            growth: classify_growth(&probe, rule)?,
            probe,
        });
    }
    let value = |o: &QuadOptions| -> Result<f64> {
        Ok(seminorm_integral(&u, k, pf, w, m - k, Domain::Interval, o)?
            .value
            .powf(1.0 / pf))
    };
    let tight = opts.with_tol(opts.tol / 10.0);
    let quotient_value = (value(opts)?, value(&tight)?);
    let bounded_ratio = ratio_of(&canceling_case(p, m, k), &u, opts)?;
    let divergent_terms: Vec<String> = expanded_terms
        .iter()
        .filter(|t| t.growth.class == Growth::Unbounded)
        .map(|t| t.name.clone())
        .collect();
    let lossy = quotient_term.growth.class == Growth::Bounded && !divergent_terms.is_empty();
    Ok(CancelingReport {
        p: pf,
        m,
        k,
        alpha_log,
        eps_cut,
        quotient_term,
        expanded_terms,
        quotient_value,
        bounded_ratio,
        divergent_terms,
        lossy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyStability {
    pub alpha_grid: Vec<f64>,
    pub eps_cut: f64,
    /// Largest ratio over the grid at eps_cut and at eps_cut/2.
    pub max_ratio: (f64, f64),
    pub relative_change: f64,
}

/// Largest canceling-case ratio over the log family, before and after
/// halving the cutoff.
pub fn family_stability(
    p: &Rational,
    m: u32,
    k: u32,
    alpha_grid: &[f64],
    eps_cut: f64,
    opts: &QuadOptions,
) -> Result<FamilyStability> {
    if alpha_grid.is_empty() {
        return Err(Error::EmptyInput("alpha grid"));
    }
    let case = canceling_case(p, m, k);
    let max_at = |cut: f64| -> Result<f64> {
        let ratios = alpha_grid
            .par_iter()
            .map(|&a| ratio_of(&case, &canceling_trial(m, a, cut)?, opts))
            .collect::<Result<Vec<f64>>>()?;
        Ok(ratios.into_iter().fold(f64::NEG_INFINITY, f64::max))
    };
    let a = max_at(eps_cut)?;
    let b = max_at(eps_cut / 2.0)?;
    Ok(FamilyStability {
        alpha_grid: alpha_grid.to_vec(),
        eps_cut,
        max_ratio: (a, b),
        relative_change: (b - a).abs() / a.abs(),
    })
}
