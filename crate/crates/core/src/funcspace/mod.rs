//! Analytic trial functions on (0,∞) and on the half-space ℝⁿ₊.
//!
//! One-dimensional factors carry exact derivatives of every order up to
//! [`MAX_ORDER`]. Half-space functions are tensor products of such factors
//! (the last coordinate is the vertical one, x_n), and finite sums of those.

mod fd;
mod smoothstep;

use serde::{Deserialize, Serialize};

pub(crate) use fd::multi_indices;
pub use fd::{central_weights, derivative_self_check, derivative_self_check_with, FdOptions};

use crate::error::{Error, Result};

/// Highest derivative order any family exposes.
pub const MAX_ORDER: u32 = 6;

/// Continuity order of the cutoff used by the log family.
const CUTOFF_SMOOTHNESS: usize = MAX_ORDER as usize;

/// Parametric families of one-dimensional factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// (r−a)^degree (b−r)^degree on [a, b], zero elsewhere.
    PolyBump { a: f64, b: f64, degree: u32 },
    /// r^r_power · log^{−alpha}(1/r) on (0, eps_cut], blended to zero on
    /// [eps_cut, 2 eps_cut].
    Log {
        alpha: f64,
        eps_cut: f64,
        #[serde(default = "default_r_power")]
        r_power: i32,
    },
    /// Σ coeffs[i] r^i on [lo, hi], zero elsewhere.
    Polynomial { coeffs: Vec<f64>, lo: f64, hi: f64 },
}

fn default_r_power() -> i32 {
    1
}

/// Affine reparametrization x ↦ scale·x + shift applied to the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Affine {
    scale: f64,
    shift: f64,
}

impl Affine {
    const IDENTITY: Affine = Affine {
        scale: 1.0,
        shift: 0.0,
    };

    fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    fn invert(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }
}

/// A smooth function of one variable with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFunction1D {
    family: Family,
    max_order: u32,
    affine: Affine,
}

pub fn make_poly_bump(a: f64, b: f64, degree: u32) -> Result<TrialFunction1D> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::out_of_range("bump start a", a, "a > 0"));
    }
    if !(b > a) || !b.is_finite() {
        return Err(Error::out_of_range("bump end b", b, "b > a"));
    }
    if degree == 0 {
        return Err(Error::out_of_range("bump degree", degree, ">= 1"));
    }
    Ok(TrialFunction1D {
        family: Family::PolyBump { a, b, degree },
        max_order: (degree - 1).min(MAX_ORDER),
        affine: Affine::IDENTITY,
    })
}

/// Like [`make_poly_bump`] but centered at `c` with half-width `h`; the
/// support may straddle zero, which is what transverse factors need.
pub fn make_transverse_bump(center: f64, half_width: f64, degree: u32) -> Result<TrialFunction1D> {
    if !(half_width > 0.0) {
        return Err(Error::out_of_range("half width", half_width, "> 0"));
    }
    if degree == 0 {
        return Err(Error::out_of_range("bump degree", degree, ">= 1"));
    }
    Ok(TrialFunction1D {
        family: Family::PolyBump {
            a: center - half_width,
            b: center + half_width,
            degree,
        },
        max_order: (degree - 1).min(MAX_ORDER),
        affine: Affine::IDENTITY,
    })
}

/// r·log^{−alpha}(1/r) near the origin, cut off smoothly above `eps_cut`.
pub fn make_log_family(alpha: f64, eps_cut: f64) -> Result<TrialFunction1D> {
    make_log_family_with_power(alpha, eps_cut, 1)
}

/// r^r_power·log^{−alpha}(1/r) near the origin, cut off above `eps_cut`.
pub fn make_log_family_with_power(
    alpha: f64,
    eps_cut: f64,
    r_power: i32,
) -> Result<TrialFunction1D> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::out_of_range("alpha_log", alpha, "(0, 1]"));
    }
    if !(eps_cut > 0.0 && eps_cut < (-1.0f64).exp()) {
        return Err(Error::out_of_range("epsilon_cut", eps_cut, "(0, 1/e)"));
    }
    Ok(TrialFunction1D {
        family: Family::Log {
            alpha,
            eps_cut,
            r_power,
        },
        max_order: MAX_ORDER,
        affine: Affine::IDENTITY,
    })
}

/// Polynomial restricted to [lo, hi]; derivatives are the polynomial's
/// inside and zero outside.
pub fn make_polynomial(coeffs: Vec<f64>, lo: f64, hi: f64) -> Result<TrialFunction1D> {
    if !(hi > lo) {
        return Err(Error::out_of_range("polynomial interval", hi, "hi > lo"));
    }
    if lo < 0.0 {
        return Err(Error::out_of_range("polynomial lo", lo, "lo >= 0"));
    }
    Ok(TrialFunction1D {
        family: Family::Polynomial { coeffs, lo, hi },
        max_order: MAX_ORDER,
        affine: Affine::IDENTITY,
    })
}

impl TrialFunction1D {
    pub fn from_family(family: Family) -> Result<Self> {
        match family {
            Family::PolyBump { a, b, degree } => {
                if a > 0.0 {
                    make_poly_bump(a, b, degree)
                } else {
                    make_transverse_bump((a + b) / 2.0, (b - a) / 2.0, degree)
                }
            }
            Family::Log {
                alpha,
                eps_cut,
                r_power,
            } => make_log_family_with_power(alpha, eps_cut, r_power),
            Family::Polynomial { coeffs, lo, hi } => make_polynomial(coeffs, lo, hi),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Restricts the advertised derivative order.
    pub fn with_max_order(mut self, order: u32) -> Result<Self> {
        if order > self.max_order {
            return Err(Error::out_of_range(
                "max_order",
                order,
                "<= the family's smoothness",
            ));
        }
        self.max_order = order;
        Ok(self)
    }

    /// f(λx) with λ > 1.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        self.scale_about(lambda, 0.0)
    }

    /// f(c + λ(x − c)).
    pub fn scale_about(&self, lambda: f64, center: f64) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::out_of_range("lambda", lambda, "> 1"));
        }
        Ok(self.dilate(lambda, center))
    }

    fn dilate(&self, lambda: f64, center: f64) -> Self {
        let Affine { scale, shift } = self.affine;
        TrialFunction1D {
            family: self.family.clone(),
            max_order: self.max_order,
            affine: Affine {
                scale: scale * lambda,
                shift: scale * (1.0 - lambda) * center + shift,
            },
        }
    }

    /// Compact label such as `poly-bump(1,2;6)@[0.5,1]`.
    pub fn describe(&self) -> String {
        let base = match &self.family {
            Family::PolyBump { a, b, degree } => format!("poly-bump({a},{b};{degree})"),
            Family::Log {
                alpha,
                eps_cut,
                r_power,
            } => format!("log(alpha={alpha},cut={eps_cut},r^{r_power})"),
            Family::Polynomial { coeffs, .. } => format!("poly{coeffs:?}"),
        };
        if self.affine == Affine::IDENTITY {
            base
        } else {
            let (lo, hi) = self.support();
            format!("{base}@[{lo:.6},{hi:.6}]")
        }
    }

    /// Closed support interval in the outer variable.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = match &self.family {
            Family::PolyBump { a, b, .. } => (*a, *b),
            Family::Log { eps_cut, .. } => (0.0, 2.0 * eps_cut),
            Family::Polynomial { lo, hi, .. } => (*lo, *hi),
        };
        let (x0, x1) = (self.affine.invert(lo), self.affine.invert(hi));
        (x0.min(x1), x0.max(x1))
    }

    /// Points where some derivative may fail to be smooth, in the outer
    /// variable; includes the support ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let raw = match &self.family {
            Family::PolyBump { a, b, .. } => vec![*a, *b],
            Family::Log { eps_cut, .. } => vec![0.0, *eps_cut, 2.0 * eps_cut],
            Family::Polynomial { lo, hi, .. } => vec![*lo, *hi],
        };
        let mut v: Vec<f64> = raw.iter().map(|&y| self.affine.invert(y)).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// True when the function (not just a weight) is singular at the origin,
    /// so integrals touching 0 need deep grading.
    pub fn has_log_singularity(&self) -> bool {
        matches!(self.family, Family::Log { .. })
    }

    /// f^{(order)}(x).
    pub fn derivative(&self, order: u32, x: f64) -> f64 {
        let y = self.affine.apply(x);
        let chain = self.affine.scale.powi(order as i32);
        if chain == 0.0 {
            return 0.0;
        }
        chain * self.base_derivative(order, y)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// d^order/dx^order [x^power · f(x)].
    pub fn derivative_times_power(&self, order: u32, power: i32, x: f64) -> f64 {
        if power == 0 {
            return self.derivative(order, x);
        }
        if let Family::Log {
            alpha,
            eps_cut,
            r_power,
        } = self.family
        {
            if self.affine == Affine::IDENTITY {
                return log_family_derivative(alpha, eps_cut, r_power + power, order, x);
            }
        }
        let mut total = 0.0;
        let mut binom = 1.0;
        for i in 0..=order {
            let j = order - i;
            let ff = falling(power as f64, j);
            if ff != 0.0 {
                total += binom * self.derivative(i, x) * ff * x.powi(power - j as i32);
            }
            binom = binom * (order - i) as f64 / (i + 1) as f64;
        }
        total
    }

    /// x^{order−power} · d^order/dx^order [x^power · f(x)].
    ///
    /// Stays finite near x = 0 for the log family, where the unscaled
    /// derivative behaves like a negative power of x.
    pub fn scaled_power_derivative(&self, order: u32, power: i32, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if let Family::Log {
            alpha,
            eps_cut,
            r_power,
        } = self.family
        {
            if self.affine == Affine::IDENTITY {
                let extra = order as i32 - power;
                return log_family_scaled(alpha, eps_cut, r_power + power, order, x, extra);
            }
        }
        let mut total = 0.0;
        let mut binom = 1.0;
        for i in 0..=order {
            let ff = falling(power as f64, order - i);
            if ff != 0.0 {
                total += binom * ff * self.scaled_derivative(i, x);
            }
            binom = binom * (order - i) as f64 / (i + 1) as f64;
        }
        total
    }

    /// x^order · f^{(order)}(x).
    fn scaled_derivative(&self, order: u32, x: f64) -> f64 {
        if let Family::Log {
            alpha,
            eps_cut,
            r_power,
        } = self.family
        {
            if self.affine.shift == 0.0 {
                // x^i (d/dx)^i f(sx) = y^i f^{(i)}(y) with y = sx
                let y = self.affine.apply(x);
                return log_family_scaled(alpha, eps_cut, r_power, order, y, order as i32);
            }
        }
        x.powi(order as i32) * self.derivative(order, x)
    }

    fn base_derivative(&self, order: u32, y: f64) -> f64 {
        match &self.family {
            Family::PolyBump { a, b, degree } => bump_derivative(*a, *b, *degree, order, y),
            Family::Log {
                alpha,
                eps_cut,
                r_power,
            } => log_family_derivative(*alpha, *eps_cut, *r_power, order, y),
            Family::Polynomial { coeffs, lo, hi } => {
                if y < *lo || y > *hi {
                    0.0
                } else {
                    poly_derivative(coeffs, order, y)
                }
            }
        }
    }
}

/// a(a−1)…(a−j+1) in floating point.
fn falling(a: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, t| acc * (a - t as f64))
}

fn bump_derivative(a: f64, b: f64, degree: u32, order: u32, y: f64) -> f64 {
    if y <= a || y >= b {
        return 0.0;
    }
    let m = degree as f64;
    let (left, right) = (y - a, b - y);
    let mut total = 0.0;
    let mut binom = 1.0;
    for i in 0..=order {
        let j = order - i;
        if i <= degree && j <= degree {
            let dl = falling(m, i) * left.powi((degree - i) as i32);
            let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
            let dr = sign * falling(m, j) * right.powi((degree - j) as i32);
            total += binom * dl * dr;
        }
        binom = binom * (order - i) as f64 / (i + 1) as f64;
    }
    total
}

pub(crate) fn poly_derivative(coeffs: &[f64], order: u32, y: f64) -> f64 {
    let o = order as usize;
    if o >= coeffs.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in (o..coeffs.len()).rev() {
        acc = acc * y + coeffs[i] * falling(i as f64, order);
    }
    acc
}

/// d^order/dr^order of r^c·L^{−α}, L = log(1/r), evaluated as
/// r^{c−order} Σ_j a_j L^{−α−j}.
pub(crate) fn log_profile_derivative(alpha: f64, c: i32, order: u32, r: f64) -> f64 {
    log_profile_scaled(alpha, c, order, r, 0)
}

/// r^extra times [`log_profile_derivative`], with the powers of r merged
/// first so tiny r does not overflow.
fn log_profile_scaled(alpha: f64, c: i32, order: u32, r: f64, extra: i32) -> f64 {
    // d/dr [r^e L^{−β}] = r^{e−1} (e L^{−β} + β L^{−β−1})
    let mut coeffs = vec![1.0];
    let mut e = c as f64;
    for _ in 0..order {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (j, &a) in coeffs.iter().enumerate() {
            next[j] += e * a;
            next[j + 1] += (alpha + j as f64) * a;
        }
        coeffs = next;
        e -= 1.0;
    }
    let l = -r.ln();
    let inv_l = 1.0 / l;
    let mut sum = 0.0;
    let mut pw = l.powf(-alpha);
    for a in coeffs {
        sum += a * pw;
        pw *= inv_l;
    }
    r.powf(e + extra as f64) * sum
}

fn log_family_scaled(alpha: f64, eps_cut: f64, c: i32, order: u32, r: f64, extra: i32) -> f64 {
    if r > 0.0 && r <= eps_cut {
        log_profile_scaled(alpha, c, order, r, extra)
    } else {
        log_family_derivative(alpha, eps_cut, c, order, r) * r.powi(extra)
    }
}

fn log_family_derivative(alpha: f64, eps_cut: f64, c: i32, order: u32, r: f64) -> f64 {
    if r <= 0.0 || r >= 2.0 * eps_cut {
        return 0.0;
    }
    if r <= eps_cut {
        return log_profile_derivative(alpha, c, order, r);
    }
    let t = (r - eps_cut) / eps_cut;
    let mut total = 0.0;
    let mut binom = 1.0;
    for i in 0..=order {
        let j = order - i;
        let cut = if j == 0 {
            1.0 - smoothstep::eval(CUTOFF_SMOOTHNESS, 0, t)
        } else {
            -smoothstep::eval(CUTOFF_SMOOTHNESS, j, t) / eps_cut.powi(j as i32)
        };
        if cut != 0.0 {
            total += binom * log_profile_derivative(alpha, c, i, r) * cut;
        }
        binom = binom * (order - i) as f64 / (i + 1) as f64;
    }
    total
}

/// A tensor-product function c·∏ᵢ fᵢ(xᵢ) on ℝⁿ₊; the last factor acts on
/// the vertical coordinate x_n.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFunctionND {
    factors: Vec<TrialFunction1D>,
    coef: f64,
}

/// Builds the tensor product with `vertical` acting on x_n.
pub fn tensorize(
    vertical: TrialFunction1D,
    transverse: Vec<TrialFunction1D>,
    n: usize,
) -> Result<TrialFunctionND> {
    if !(1..=3).contains(&n) {
        return Err(Error::out_of_range("dimension n", n, "1..=3"));
    }
    if transverse.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: transverse.len(),
        });
    }
    let mut factors = transverse;
    factors.push(vertical);
    Ok(TrialFunctionND { factors, coef: 1.0 })
}

impl TrialFunctionND {
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn vertical(&self) -> &TrialFunction1D {
        self.factors.last().expect("at least one factor")
    }

    pub fn transverse(&self) -> &[TrialFunction1D] {
        &self.factors[..self.factors.len() - 1]
    }

    pub fn factors(&self) -> &[TrialFunction1D] {
        &self.factors
    }

    pub fn coefficient(&self) -> f64 {
        self.coef
    }

    pub fn max_order(&self) -> u32 {
        self.factors
            .iter()
            .map(TrialFunction1D::max_order)
            .min()
            .unwrap_or(0)
    }

    /// c·u.
    pub fn times(&self, c: f64) -> Self {
        TrialFunctionND {
            factors: self.factors.clone(),
            coef: self.coef * c,
        }
    }

    /// u_λ(x) = u(λx), λ > 1.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        let origin = vec![0.0; self.dim()];
        self.scale_about(lambda, &origin)
    }

    /// u(c + λ(x − c)), λ > 1.
    pub fn scale_about(&self, lambda: f64, center: &[f64]) -> Result<Self> {
        if center.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: center.len(),
            });
        }
        let factors = self
            .factors
            .iter()
            .zip(center)
            .map(|(f, &c)| f.scale_about(lambda, c))
            .collect::<Result<_>>()?;
        Ok(TrialFunctionND {
            factors,
            coef: self.coef,
        })
    }

    /// Factor labels joined with `x`, vertical factor last.
    pub fn describe(&self) -> String {
        let body: Vec<String> = self.factors.iter().map(TrialFunction1D::describe).collect();
        if self.coef == 1.0 {
            body.join(" x ")
        } else {
            format!("{} * {}", self.coef, body.join(" x "))
        }
    }

    pub fn support_box(&self) -> Vec<(f64, f64)> {
        self.factors.iter().map(TrialFunction1D::support).collect()
    }

    /// ∂^β u(x).
    pub fn partial(&self, beta: &[u32], x: &[f64]) -> f64 {
        debug_assert_eq!(beta.len(), self.dim());
        let mut v = self.coef;
        for ((f, &b), &xi) in self.factors.iter().zip(beta).zip(x) {
            if v == 0.0 {
                break;
            }
            v *= f.derivative(b, xi);
        }
        v
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let zeros = vec![0; self.dim()];
        self.partial(&zeros, x)
    }
}

/// Points in (lo, hi) where `g` changes sign, located by bisection after
/// sampling `samples` points (geometrically spaced when lo = 0).
pub fn sign_changes<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    let xs: Vec<f64> = if lo > 0.0 {
        (0..=samples)
            .map(|i| lo + (hi - lo) * i as f64 / samples as f64)
            .collect()
    } else {
        let start = hi * 1e-12;
        (0..=samples)
            .map(|i| start * (hi / start).powf(i as f64 / samples as f64))
            .collect()
    };
    let mut roots = Vec::new();
    let mut prev = (xs[0], g(xs[0]));
    for &x in &xs[1..] {
        let v = g(x);
        if prev.1 != 0.0 && v != 0.0 && (prev.1 < 0.0) != (v < 0.0) {
            let (mut a, mut b) = (prev.0, x);
            let fa_neg = prev.1 < 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (g(mid) < 0.0) == fa_neg {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        if v != 0.0 {
            prev = (x, v);
        }
    }
    roots
}

/// Functions written as finite sums of tensor products, which is all the
/// norm machinery needs.
pub trait Separable: Sync {
    fn dim(&self) -> usize;
    fn max_order(&self) -> u32;
    fn tensor_terms(&self) -> Vec<&TrialFunctionND>;

    /// Smallest box containing every term's support.
    fn support_box(&self) -> Vec<(f64, f64)> {
        let terms = self.tensor_terms();
        let mut bx: Vec<(f64, f64)> = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim()];
        for t in terms {
            for (slot, (lo, hi)) in bx.iter_mut().zip(t.support_box()) {
                slot.0 = slot.0.min(lo);
                slot.1 = slot.1.max(hi);
            }
        }
        bx
    }

    fn partial(&self, beta: &[u32], x: &[f64]) -> f64 {
        self.tensor_terms().iter().map(|t| t.partial(beta, x)).sum()
    }

    /// Breakpoints along axis `axis`, merged across terms.
    fn axis_breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .tensor_terms()
            .iter()
            .flat_map(|t| t.factors()[axis].breakpoints())
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));
        v
    }

    fn has_log_singularity(&self) -> bool {
        self.tensor_terms()
            .iter()
            .any(|t| t.vertical().has_log_singularity())
    }

    /// True when every term has a zero coefficient.
    fn is_zero(&self) -> bool {
        self.tensor_terms().iter().all(|t| t.coefficient() == 0.0)
    }
}

impl Separable for TrialFunctionND {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn max_order(&self) -> u32 {
        TrialFunctionND::max_order(self)
    }

    fn tensor_terms(&self) -> Vec<&TrialFunctionND> {
        vec![self]
    }

    fn support_box(&self) -> Vec<(f64, f64)> {
        TrialFunctionND::support_box(self)
    }

    fn partial(&self, beta: &[u32], x: &[f64]) -> f64 {
        TrialFunctionND::partial(self, beta, x)
    }
}

/// Σ terms, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialCombination {
    terms: Vec<TrialFunctionND>,
}

impl TrialCombination {
    pub fn new(terms: Vec<TrialFunctionND>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or(Error::EmptyInput("combination terms"))?;
        let n = first.dim();
        if let Some(bad) = terms.iter().find(|t| t.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        Ok(TrialCombination { terms })
    }

    pub fn terms(&self) -> &[TrialFunctionND] {
        &self.terms
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.scale(lambda))
            .collect::<Result<_>>()?;
        Ok(TrialCombination { terms })
    }
}

impl Separable for TrialCombination {
    fn dim(&self) -> usize {
        self.terms[0].dim()
    }

    fn max_order(&self) -> u32 {
        self.terms
            .iter()
            .map(TrialFunctionND::max_order)
            .min()
            .unwrap_or(0)
    }

    fn tensor_terms(&self) -> Vec<&TrialFunctionND> {
        self.terms.iter().collect()
    }
}

/// Scales a 1D function as a one-factor half-line function.
pub fn scale(f: &TrialFunctionND, lambda: f64) -> Result<TrialFunctionND> {
    f.scale(lambda)
}

#[cfg(test)]
mod tests;
