//! The inequality catalog as Rayleigh ratios, an exact hypothesis
//! validator, and the one-dimensional Taylor/Hardy computations.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{Separable, TrialFunction1D};
use crate::norms::{seminorm_integral, Domain, QuotientSpec, WeightedNormSpec};
use crate::quadrature::{integrate_weighted_1d_with, IntegralResult, QuadOptions};
use crate::rational::{factorial, format_rational, int, serde_rational, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// ‖u/d‖_{L^p(d^α)} ≤ C‖u‖_{W^{1,p}(d^α)}, α ≠ p − 1.
    Classical1,
    /// ‖u/d‖_{W^{1,p}(d^{p−1})} ≤ C‖u‖_{W^{2,p}(d^{p−1})}.
    Second2,
    /// ‖u/d^{m−k}‖_{W^{k,q}(d^r)} ≤ C‖u‖_{W^{m,p}(d^{p−1})}.
    MainThm,
    /// Top-order half-space form with weights x_n^{βq}, x_n^{αp}.
    HalfSpace,
    /// The half-line version with p = q, α = β.
    OneD,
    /// The k / k+1 interpolation step.
    Interp,
}

impl CaseId {
    pub fn default_domain(&self) -> Domain {
        match self {
            CaseId::Classical1 | CaseId::Second2 => Domain::Interval,
            CaseId::MainThm => Domain::Strip,
            CaseId::HalfSpace | CaseId::Interp => Domain::HalfSpace,
            CaseId::OneD => Domain::HalfLine,
        }
    }

    fn required(&self) -> &'static [&'static str] {
        match self {
            CaseId::Classical1 => &["p", "alpha"],
            CaseId::Second2 => &["p"],
            CaseId::MainThm => &["n", "m", "k", "p", "q", "r"],
            CaseId::HalfSpace | CaseId::Interp => &["n", "m", "k", "p", "q", "alpha", "beta"],
            CaseId::OneD => &["m", "k", "p", "alpha"],
        }
    }
}

/// A case with its parameters; which ones matter depends on `id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityCase {
    pub id: CaseId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(
        default,
        with = "serde_rational::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub p: Option<Rational>,
    #[serde(
        default,
        with = "serde_rational::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub q: Option<Rational>,
    #[serde(
        default,
        with = "serde_rational::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha: Option<Rational>,
    #[serde(
        default,
        with = "serde_rational::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub beta: Option<Rational>,
    #[serde(
        default,
        with = "serde_rational::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub r: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

impl InequalityCase {
    fn blank(id: CaseId) -> Self {
        InequalityCase {
            id,
            n: None,
            m: None,
            k: None,
            p: None,
            q: None,
            alpha: None,
            beta: None,
            r: None,
            domain: None,
        }
    }

    pub fn classical(p: Rational, alpha: Rational) -> Self {
        InequalityCase {
            p: Some(p),
            alpha: Some(alpha),
            ..Self::blank(CaseId::Classical1)
        }
    }

    pub fn second(p: Rational) -> Self {
        InequalityCase {
            p: Some(p),
            ..Self::blank(CaseId::Second2)
        }
    }

    pub fn main_thm(n: u32, m: u32, k: u32, p: Rational, q: Rational, r: Rational) -> Self {
        InequalityCase {
            n: Some(n),
            m: Some(m),
            k: Some(k),
            p: Some(p),
            q: Some(q),
            r: Some(r),
            ..Self::blank(CaseId::MainThm)
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn two_weight(
        id: CaseId,
        n: u32,
        m: u32,
        k: u32,
        p: Rational,
        q: Rational,
        alpha: Rational,
        beta: Rational,
    ) -> Self {
        InequalityCase {
            n: Some(n),
            m: Some(m),
            k: Some(k),
            p: Some(p),
            q: Some(q),
            alpha: Some(alpha),
            beta: Some(beta),
            ..Self::blank(id)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn half_space(
        n: u32,
        m: u32,
        k: u32,
        p: Rational,
        q: Rational,
        alpha: Rational,
        beta: Rational,
    ) -> Self {
        Self::two_weight(CaseId::HalfSpace, n, m, k, p, q, alpha, beta)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn interp(
        n: u32,
        m: u32,
        k: u32,
        p: Rational,
        q: Rational,
        alpha: Rational,
        beta: Rational,
    ) -> Self {
        Self::two_weight(CaseId::Interp, n, m, k, p, q, alpha, beta)
    }

    pub fn one_d(m: u32, k: u32, p: Rational, alpha: Rational) -> Self {
        InequalityCase {
            m: Some(m),
            k: Some(k),
            p: Some(p),
            alpha: Some(alpha),
            ..Self::blank(CaseId::OneD)
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain.unwrap_or_else(|| self.id.default_domain())
    }

    fn has(&self, name: &str) -> bool {
        match name {
            "n" => self.n.is_some(),
            "m" => self.m.is_some(),
            "k" => self.k.is_some(),
            "p" => self.p.is_some(),
            "q" => self.q.is_some(),
            "alpha" => self.alpha.is_some(),
            "beta" => self.beta.is_some(),
            "r" => self.r.is_some(),
            _ => false,
        }
    }

    fn rat(&self, v: &Option<Rational>, name: &'static str) -> Result<Rational> {
        v.clone()
            .ok_or_else(|| Error::Hypothesis(format!("missing parameter {name}")))
    }

    fn nat(&self, v: Option<u32>, name: &'static str) -> Result<u32> {
        v.ok_or_else(|| Error::Hypothesis(format!("missing parameter {name}")))
    }

    /// Short human-readable parameter list.
    pub fn describe(&self) -> String {
        let mut parts = vec![format!("{:?}", self.id)];
        for (name, v) in [("n", self.n), ("m", self.m), ("k", self.k)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        for (name, v) in [
            ("p", &self.p),
            ("q", &self.q),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("r", &self.r),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}={}", format_rational(v)));
            }
        }
        parts.join(" ")
    }
}

/// Outcome of the exact hypothesis check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Verdict {
    pub valid: bool,
    pub violated: Vec<String>,
    /// Non-strict conditions that hold with equality.
    pub boundary: Vec<String>,
}

struct Checker {
    violated: Vec<String>,
    boundary: Vec<String>,
}

impl Checker {
    /// lhs ≥ rhs, noting equality.
    fn ge(&mut self, name: &str, lhs: &Rational, rhs: &Rational) {
        if lhs < rhs {
            self.violated.push(name.to_string());
        } else if lhs == rhs {
            self.boundary.push(name.to_string());
        }
    }

    fn lt(&mut self, name: &str, lhs: &Rational, rhs: &Rational) {
        if lhs >= rhs {
            self.violated.push(name.to_string());
        }
    }

    fn holds(&mut self, name: &str, ok: bool) {
        if !ok {
            self.violated.push(name.to_string());
        }
    }
}

/// Checks every hypothesis of the case's statement in exact arithmetic.
pub fn validate_params(case: &InequalityCase) -> Verdict {
    let mut c = Checker {
        violated: Vec::new(),
        boundary: Vec::new(),
    };
    let missing: Vec<String> = case
        .id
        .required()
        .iter()
        .filter(|name| !case.has(name))
        .map(|name| format!("missing_{name}"))
        .collect();
    if !missing.is_empty() {
        return Verdict {
            valid: false,
            violated: missing,
            boundary: Vec::new(),
        };
    }
    let one = Rational::one();
    let p = case.p.clone().expect("checked");
    c.ge("p_ge_1", &p, &one);

    if let Some(n) = case.n {
        c.holds("n_ge_1", n >= 1);
    }
    if let (Some(m), Some(k)) = (case.m, case.k) {
        c.holds("m_ge_2", m >= 2);
        c.holds("k_range", k >= 1 && k < m);
    }

    match case.id {
        CaseId::Classical1 => {
            let alpha = case.alpha.as_ref().expect("checked");
            c.holds("alpha_ne_p_minus_1", *alpha != &p - &one);
        }
        CaseId::Second2 => {}
        CaseId::MainThm => {
            let n = int(case.n.expect("checked") as i64);
            let mk = int(case.m.expect("checked") as i64 - case.k.expect("checked") as i64);
            let q = case.q.clone().expect("checked");
            let r = case.r.clone().expect("checked");
            c.ge("p_le_q", &q, &p);
            if q.is_positive() && n.is_positive() && p.is_positive() {
                let lhs = q.recip();
                let rhs = (&n - &p * &mk) / (&n * &p);
                c.ge("pq", &lhs, &rhs);
                let bound = (&q * (&n - &one) - &p * (&n - &q)) / &p;
                c.ge("r", &r, &bound);
            }
        }
        CaseId::HalfSpace | CaseId::Interp => {
            let n = int(case.n.expect("checked") as i64);
            let k = int(case.k.expect("checked") as i64);
            let mk = int(case.m.expect("checked") as i64) - &k;
            let q = case.q.clone().expect("checked");
            let alpha = case.alpha.clone().expect("checked");
            let beta = case.beta.clone().expect("checked");
            c.ge("p_le_q", &q, &p);
            if p.is_positive() && q.is_positive() && n.is_positive() {
                let lhs = p.recip() - q.recip();
                c.holds("scaling", lhs == (&beta - &alpha) / &n);
            }
            c.ge("alpha_le_beta", &beta, &alpha);
            if case.id == CaseId::HalfSpace {
                if p.is_positive() {
                    c.lt("alpha_lt_k_plus", &alpha, &(&k + (&p - &one) / &p));
                }
                c.ge("beta_le_alpha_plus_m_minus_k", &(&alpha + &mk), &beta);
            } else {
                c.ge("beta_le_alpha_plus_1", &(&alpha + &one), &beta);
            }
        }
        CaseId::OneD => {
            let k = int(case.k.expect("checked") as i64);
            let alpha = case.alpha.clone().expect("checked");
            if p.is_positive() {
                c.lt("alpha_lt_k_plus", &alpha, &(&k + (&p - &one) / &p));
            }
        }
    }
    Verdict {
        valid: c.violated.is_empty(),
        violated: c.violated,
        boundary: c.boundary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub error_estimate: f64,
}

impl NormValue {
    /// Σ_j I_j^{1/p} with first-order error propagation.
    fn from_integrals(parts: &[IntegralResult], p: f64) -> Self {
        let mut value = 0.0;
        let mut err = 0.0;
        for r in parts {
            let v = r.value.max(0.0);
            let root = v.powf(1.0 / p);
            value += root;
            if v > 0.0 {
                err += root / p * r.error_estimate / v;
            }
        }
        NormValue {
            value,
            error_estimate: err,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub case: InequalityCase,
    pub verdict: Verdict,
    pub lhs: NormValue,
    pub rhs: NormValue,
    /// lhs/rhs when rhs > 0.
    pub ratio: Option<f64>,
    /// "degenerate" for u = 0, "inconsistent" for rhs = 0 < lhs.
    pub flag: Option<String>,
    pub trial: Option<String>,
}

/// The left and right norms of a case evaluated on `u`.
pub fn case_sides<F: Separable + ?Sized>(
    case: &InequalityCase,
    u: &F,
    opts: &QuadOptions,
) -> Result<(NormValue, NormValue)> {
    let domain = case.domain();
    let n_u = u.dim() as u32;
    if let Some(n) = case.n {
        if n != n_u {
            return Err(Error::DimensionMismatch {
                expected: n as usize,
                got: n_u as usize,
            });
        }
    }
    let p = to_f64(&case.rat(&case.p, "p")?);
    let seminorm =
        |j: u32, p: f64, w: f64, div: u32| seminorm_integral(u, j, p, w, div, domain, opts);
    let lhs;
    let rhs;
    match case.id {
        CaseId::Classical1 => {
            let alpha = to_f64(&case.rat(&case.alpha, "alpha")?);
            lhs = norm_of(u, &QuotientSpec::new(1, 0, p, alpha, domain), opts)?;
            rhs = sobolev_of(u, &WeightedNormSpec::full(1, p, alpha, domain), opts)?;
        }
        CaseId::Second2 => {
            lhs = norm_of(u, &QuotientSpec::new(1, 1, p, p - 1.0, domain), opts)?;
            rhs = sobolev_of(u, &WeightedNormSpec::full(2, p, p - 1.0, domain), opts)?;
        }
        CaseId::MainThm => {
            let m = case.nat(case.m, "m")?;
            let k = case.nat(case.k, "k")?;
            let q = to_f64(&case.rat(&case.q, "q")?);
            let r = to_f64(&case.rat(&case.r, "r")?);
            lhs = norm_of(u, &QuotientSpec::new(m - k, k, q, r, domain), opts)?;
            rhs = sobolev_of(u, &WeightedNormSpec::full(m, p, p - 1.0, domain), opts)?;
        }
        CaseId::HalfSpace | CaseId::OneD => {
            let m = case.nat(case.m, "m")?;
            let k = case.nat(case.k, "k")?;
            let alpha = to_f64(&case.rat(&case.alpha, "alpha")?);
            let (q, beta) = if case.id == CaseId::OneD {
                (p, alpha)
            } else {
                (
                    to_f64(&case.rat(&case.q, "q")?),
                    to_f64(&case.rat(&case.beta, "beta")?),
                )
            };
            lhs = NormValue::from_integrals(&[seminorm(k, q, beta * q, m - k)?], q);
            rhs = NormValue::from_integrals(&[seminorm(m, p, alpha * p, 0)?], p);
        }
        CaseId::Interp => {
            let m = case.nat(case.m, "m")?;
            let k = case.nat(case.k, "k")?;
            let q = to_f64(&case.rat(&case.q, "q")?);
            let alpha = to_f64(&case.rat(&case.alpha, "alpha")?);
            let beta = to_f64(&case.rat(&case.beta, "beta")?);
            lhs = NormValue::from_integrals(&[seminorm(k, q, beta * q, m - k)?], q);
            let a = seminorm(k + 1, p, (alpha + 1.0) * p, m - k)?;
            let b = seminorm(k, p, alpha * p, m - k)?;
            let sum = IntegralResult {
                value: a.value + b.value,
                error_estimate: a.error_estimate + b.error_estimate,
                refinement_level: a.refinement_level.max(b.refinement_level),
            };
            rhs = NormValue::from_integrals(&[sum], p);
        }
    }
    Ok((lhs, rhs))
}

fn norm_of<F: Separable + ?Sized>(
    u: &F,
    qs: &QuotientSpec,
    opts: &QuadOptions,
) -> Result<NormValue> {
    let parts = qs
        .orders
        .iter()
        .map(|&j| seminorm_integral(u, j, qs.q, qs.r, qs.divisor_power, qs.domain, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormValue::from_integrals(&parts, qs.q))
}

fn sobolev_of<F: Separable + ?Sized>(
    u: &F,
    spec: &WeightedNormSpec,
    opts: &QuadOptions,
) -> Result<NormValue> {
    let parts = spec
        .orders
        .iter()
        .map(|&j| seminorm_integral(u, j, spec.p, spec.weight_exponent, 0, spec.domain, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormValue::from_integrals(&parts, spec.p))
}

/// Evaluates both sides of `case` on `u` and their ratio.
pub fn ratio_report<F: Separable + ?Sized>(
    case: &InequalityCase,
    u: &F,
    opts: &QuadOptions,
) -> Result<RatioReport> {
    let verdict = validate_params(case);
    if verdict.violated.iter().any(|v| v.starts_with("missing_")) {
        return Err(Error::Hypothesis(verdict.violated.join(", ")));
    }
    let (lhs, rhs) = case_sides(case, u, opts)?;
    let (ratio, flag) = if rhs.value > 0.0 {
        (Some(lhs.value / rhs.value), None)
    } else if lhs.value > 0.0 {
        (None, Some("inconsistent".to_string()))
    } else {
        (None, Some("degenerate".to_string()))
    };
    Ok(RatioReport {
        case: case.clone(),
        verdict,
        lhs,
        rhs,
        ratio,
        flag,
        trial: None,
    })
}

/// Largest |LHS − RHS| over `r_points` for the Taylor-remainder formula
///
/// (f/r^{m−k})^{(k)}(r) = 1/(m−k−1)! ∫₀^r f^{(m)}(s)(1−s/r)^{m−k−1}(s/r)^{k−1} s/r² ds.
pub fn taylor_representation_check(
    f: &TrialFunction1D,
    m: u32,
    k: u32,
    r_points: &[f64],
    opts: &QuadOptions,
) -> Result<f64> {
    if m < 2 || k == 0 || k >= m {
        return Err(Error::Hypothesis(format!(
            "need m >= 2 and 1 <= k <= m-1, got m={m}, k={k}"
        )));
    }
    if f.max_order() < m {
        return Err(Error::out_of_range("m", m, "<= max_order of f"));
    }
    let (lo, _) = f.support();
    if lo <= 0.0 {
        return Err(Error::SupportOutsideDomain {
            support: vec![f.support()],
            domain: "(0, inf)".to_string(),
        });
    }
    let mk = m - k;
    let fact = factorial(mk - 1)
        .to_string()
        .parse::<f64>()
        .unwrap_or(f64::INFINITY);
    let breaks = f.breakpoints();
    let mut worst: f64 = 0.0;
    for &r in r_points {
        if !(r > 0.0) {
            return Err(Error::OutsideDomain { point: vec![r] });
        }
        let lhs = f.derivative_times_power(k, -(mk as i32), r);
        let rhs = if r <= lo {
            0.0
        } else {
            let kernel = |s: f64| {
                let t = s / r;
                f.derivative(m, s) * (1.0 - t).powi(mk as i32 - 1) * t.powi(k as i32 - 1) * s
                    / (r * r)
            };
            integrate_weighted_1d_with(kernel, 0.0, (lo, r), &breaks, opts)?.value / fact
        };
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// p / ((m−k−1)!·((k+1−α)p − 1)), valid when α < k + (p−1)/p.
pub fn hardy_upper_bound(m: u32, k: u32, p: &Rational, alpha: &Rational) -> Result<Rational> {
    let case = InequalityCase::one_d(m, k, p.clone(), alpha.clone());
    let verdict = validate_params(&case);
    if !verdict.valid {
        return Err(Error::Hypothesis(verdict.violated.join(", ")));
    }
    let sigma = (int(k as i64 + 1) - alpha) * p;
    let denom = Rational::from_integer(factorial(m - k - 1)) * (sigma - Rational::one());
    Ok(p / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderStep {
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
}

/// α_i = ((m−k−i)β + iα)/(m−k), 1/p_i = (i/p + (m−k−i)/q)/(m−k), i = 0..=m−k.
///
/// Requires the half-space hypotheses for dimension `n` and checks the
/// step relations between consecutive rungs exactly.
pub fn interpolation_ladder(
    n: u32,
    m: u32,
    k: u32,
    p: &Rational,
    q: &Rational,
    alpha: &Rational,
    beta: &Rational,
) -> Result<Vec<LadderStep>> {
    let case =
        InequalityCase::half_space(n, m, k, p.clone(), q.clone(), alpha.clone(), beta.clone());
    let verdict = validate_params(&case);
    if !verdict.valid {
        return Err(Error::Hypothesis(verdict.violated.join(", ")));
    }
    let mk = int((m - k) as i64);
    let steps: Vec<LadderStep> = (0..=(m - k))
        .map(|i| {
            let i = int(i as i64);
            let a = ((&mk - &i) * beta + &i * alpha) / &mk;
            let inv = (&i / p + (&mk - &i) / q) / &mk;
            LadderStep {
                p: inv.recip(),
                alpha: a,
            }
        })
        .collect();
    let nn = int(n as i64);
    for w in steps.windows(2) {
        let (s0, s1) = (&w[0], &w[1]);
        let ok = s1.p >= Rational::one()
            && s1.p <= s0.p
            && s1.p.recip() - s0.p.recip() == (&s0.alpha - &s1.alpha) / &nn
            && &s0.alpha - &s1.alpha == (beta - alpha) / &mk
            && &s0.alpha - &s1.alpha <= Rational::one();
        if !ok {
            return Err(Error::Hypothesis("ladder step relations fail".into()));
        }
    }
    let (first, last) = (&steps[0], &steps[steps.len() - 1]);
    if first.alpha != *beta || last.alpha != *alpha || first.p != *q || last.p != *p {
        return Err(Error::Hypothesis("ladder endpoints do not match".into()));
    }
    Ok(steps)
}

/// True for the zero rational, handy in fixtures.
pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}
