//! Weighted Sobolev norms ‖u‖ = Σ_j (∫ d^w |∇^j u|^p)^{1/p} and the quotient
//! norms of u/d^M, on model domains where d(x) = x_n.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{multi_indices, sign_changes, Separable};
use crate::quadrature::{
    integrate_weighted_1d_with, refine_until_converged, tensor_sum_indexed, GradedMesh,
    IntegralResult, QuadOptions,
};

/// Model domains. On each of them the distance weight is d(x) = x_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// (0, ∞).
    HalfLine,
    /// (0, 1) with d = min(x, 1 − x); supports must stay in (0, 1/2].
    Interval,
    /// ℝⁿ₊.
    HalfSpace,
    /// B₁ⁿ⁻¹ × (0, 1).
    Strip,
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::HalfLine => "half-line",
            Domain::Interval => "interval",
            Domain::HalfSpace => "half-space",
            Domain::Strip => "strip",
        }
    }

    /// Checks that `u` lives where d = x_n is exact.
    pub fn admit<F: Separable + ?Sized>(&self, u: &F) -> Result<()> {
        let n = u.dim();
        if matches!(self, Domain::HalfLine | Domain::Interval) && n != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: n,
            });
        }
        let bx = u.support_box();
        let outside = || Error::SupportOutsideDomain {
            support: bx.clone(),
            domain: self.name().to_string(),
        };
        let (vlo, vhi) = bx[n - 1];
        if vlo < 0.0 {
            return Err(outside());
        }
        match self {
            Domain::HalfLine | Domain::HalfSpace => Ok(()),
            Domain::Interval => {
                if vhi > 1.0 {
                    Err(outside())
                } else if vhi > 0.5 {
                    Err(Error::MidlineCrossing)
                } else {
                    Ok(())
                }
            }
            Domain::Strip => {
                let radius2: f64 = bx[..n - 1]
                    .iter()
                    .map(|(lo, hi)| lo.abs().max(hi.abs()).powi(2))
                    .sum();
                if vhi > 1.0 || radius2 >= 1.0 {
                    Err(outside())
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormSpec {
    pub p: f64,
    /// Power of d in the weight.
    pub weight_exponent: f64,
    pub orders: Vec<u32>,
    pub domain: Domain,
}

impl WeightedNormSpec {
    /// The full W^{m,p}(d^w) norm, orders 0..=m.
    pub fn full(m: u32, p: f64, weight_exponent: f64, domain: Domain) -> Self {
        WeightedNormSpec {
            p,
            weight_exponent,
            orders: (0..=m).collect(),
            domain,
        }
    }

    /// Only the order-m seminorm.
    pub fn seminorm(m: u32, p: f64, weight_exponent: f64, domain: Domain) -> Self {
        WeightedNormSpec {
            p,
            weight_exponent,
            orders: vec![m],
            domain,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::out_of_range("p", self.p, "[1, inf)"));
        }
        if self.orders.is_empty() {
            return Err(Error::EmptyInput("norm orders"));
        }
        Ok(())
    }
}

/// ‖u/d^{divisor_power}‖ in W^{k,q}(d^r), orders 0..=k unless narrowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientSpec {
    pub divisor_power: u32,
    pub k: u32,
    pub q: f64,
    pub r: f64,
    pub orders: Vec<u32>,
    pub domain: Domain,
}

impl QuotientSpec {
    pub fn new(divisor_power: u32, k: u32, q: f64, r: f64, domain: Domain) -> Self {
        QuotientSpec {
            divisor_power,
            k,
            q,
            r,
            orders: (0..=k).collect(),
            domain,
        }
    }

    pub fn top_order_only(mut self) -> Self {
        self.orders = vec![self.k];
        self
    }

    fn validate(&self) -> Result<()> {
        if self.divisor_power == 0 {
            return Err(Error::out_of_range("divisor power m-k", 0, ">= 1"));
        }
        if let Some(&o) = self.orders.iter().find(|&&o| o > self.k) {
            return Err(Error::out_of_range("quotient order", o, "<= k"));
        }
        self.as_norm_spec().validate()
    }

    fn as_norm_spec(&self) -> WeightedNormSpec {
        WeightedNormSpec {
            p: self.q,
            weight_exponent: self.r,
            orders: self.orders.clone(),
            domain: self.domain,
        }
    }
}

/// Multinomial j!/∏βᵢ!, the number of ordered index tuples giving β.
fn multiplicity(beta: &[u32]) -> f64 {
    let j: u32 = beta.iter().sum();
    let mut m = (1..=j).map(f64::from).product::<f64>();
    for &b in beta {
        m /= (1..=b).map(f64::from).product::<f64>();
    }
    m
}

/// One order-j integral ∫ x_n^w |∇^j(u x_n^{−M})|^p over the support box.
struct SeminormTask<'a, F: Separable + ?Sized> {
    u: &'a F,
    j: u32,
    p: f64,
    w: f64,
    big_m: u32,
}

impl<F: Separable + ?Sized> SeminormTask<'_, F> {
    /// Per-term, per-axis tables of derivative values at the axis nodes.
    /// Transverse axes hold f^{(o)}(x); the vertical axis holds
    /// x^{o+M} ∂^o(x^{−M} f) · x^{j−o}, i.e. everything after pulling out
    /// x^{−(j+M)}.
    fn tables(&self, axes: &[(Vec<f64>, Vec<f64>)]) -> Vec<Vec<Vec<Vec<f64>>>> {
        let n = self.u.dim();
        let m = -(self.big_m as i32);
        self.u
            .tensor_terms()
            .iter()
            .map(|t| {
                (0..n)
                    .map(|i| {
                        let f = &t.factors()[i];
                        (0..=self.j)
                            .map(|o| {
                                axes[i]
                                    .0
                                    .iter()
                                    .map(|&x| {
                                        if i + 1 == n {
                                            f.scaled_power_derivative(o, m, x)
                                                * x.powi((self.j - o) as i32)
                                        } else {
                                            f.derivative(o, x)
                                        }
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Per-axis breakpoints. Unless p is an even integer, |·|^p has kinks
    /// where a factor derivative changes sign, so those points are added.
    fn breakpoints(&self) -> Vec<Vec<f64>> {
        let n = self.u.dim();
        let smooth_power = self.p.fract() == 0.0 && (self.p as u64).is_multiple_of(2);
        let m = -(self.big_m as i32);
        (0..n)
            .map(|i| {
                let mut br = self.u.axis_breakpoints(i);
                if !smooth_power {
                    for t in self.u.tensor_terms() {
                        let f = &t.factors()[i];
                        let (lo, hi) = f.support();
                        for o in 0..=self.j {
                            if i + 1 == n {
                                br.extend(sign_changes(
                                    |x| f.scaled_power_derivative(o, m, x),
                                    lo,
                                    hi,
                                    512,
                                ));
                            } else {
                                br.extend(sign_changes(|x| f.derivative(o, x), lo, hi, 512));
                            }
                        }
                    }
                    br.sort_by(f64::total_cmp);
                    br.dedup();
                }
                br
            })
            .collect()
    }

    fn axes(
        &self,
        breaks: &[Vec<f64>],
        level: u32,
        opts: &QuadOptions,
    ) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let bx = self.u.support_box();
        bx.iter()
            .zip(breaks)
            .map(|(&(lo, hi), br)| {
                GradedMesh::build(lo, hi, br, opts, level).map(|m| m.nodes_weights())
            })
            .collect()
    }

    fn run(&self, opts: &QuadOptions) -> Result<IntegralResult> {
        if self.u.is_zero() {
            return Ok(IntegralResult {
                value: 0.0,
                error_estimate: 0.0,
                refinement_level: 0,
            });
        }
        if self.p == 2.0 && self.u.tensor_terms().len() == 1 {
            return self.run_separable(opts);
        }
        let n = self.u.dim();
        let betas = multi_indices(n, self.j);
        let mults: Vec<f64> = betas.iter().map(|b| multiplicity(b)).collect();
        let coefs: Vec<f64> = self
            .u
            .tensor_terms()
            .iter()
            .map(|t| t.coefficient())
            .collect();
        let pole = (self.j + self.big_m) as f64;
        let breaks = self.breakpoints();
        refine_until_converged(opts, |level| {
            let axes = self.axes(&breaks, level, opts)?;
            let tables = self.tables(&axes);
            Ok(tensor_sum_indexed(&axes, |idx, x| {
                let mut s = 0.0;
                for (beta, mult) in betas.iter().zip(&mults) {
                    let mut d = 0.0;
                    for (t, c) in tables.iter().zip(&coefs) {
                        let mut prod = *c;
                        for i in 0..n {
                            prod *= t[i][beta[i] as usize][idx[i]];
                            if prod == 0.0 {
                                break;
                            }
                        }
                        d += prod;
                    }
                    s += mult * d * d;
                }
                if s == 0.0 {
                    return 0.0;
                }
                let xn = x[n - 1];
                ((self.w - self.p * pole) * xn.ln() + 0.5 * self.p * s.ln()).exp()
            }))
        })
    }

    /// p = 2 and one tensor term: the integral factors over the axes.
    fn run_separable(&self, opts: &QuadOptions) -> Result<IntegralResult> {
        let t = self.u.tensor_terms()[0];
        let n = t.dim();
        let c2 = t.coefficient() * t.coefficient();
        let m = -(self.big_m as i32);
        let pole = (self.j + self.big_m) as f64;
        let mut total = 0.0;
        let mut err = 0.0;
        let mut level = 0;
        let mut cache: std::collections::HashMap<(usize, u32), IntegralResult> = Default::default();
        for beta in multi_indices(n, self.j) {
            let mut prod = c2 * multiplicity(&beta);
            let mut rel = 0.0;
            for (i, &o) in beta.iter().enumerate().take(n) {
                let key = (i, o);
                let res = match cache.get(&key) {
                    Some(r) => *r,
                    None => {
                        let f = &t.factors()[i];
                        let (lo, hi) = f.support();
                        let br = f.breakpoints();
                        let r = if i + 1 == n {
                            let j = self.j;
                            let w = self.w;
                            integrate_weighted_1d_with(
                                |x| {
                                    let v =
                                        f.scaled_power_derivative(o, m, x) * x.powi((j - o) as i32);
                                    if v == 0.0 {
                                        0.0
                                    } else {
                                        ((w - 2.0 * pole) * x.ln() + 2.0 * v.abs().ln()).exp()
                                    }
                                },
                                0.0,
                                (lo, hi),
                                &br,
                                opts,
                            )?
                        } else {
                            integrate_weighted_1d_with(
                                |x| f.derivative(o, x).powi(2),
                                0.0,
                                (lo, hi),
                                &br,
                                opts,
                            )?
                        };
                        cache.insert(key, r);
                        r
                    }
                };
                prod *= res.value;
                if res.value != 0.0 {
                    rel += res.error_estimate / res.value.abs();
                }
                level = level.max(res.refinement_level);
            }
            total += prod;
            err += prod.abs() * rel;
        }
        Ok(IntegralResult {
            value: total,
            error_estimate: err,
            refinement_level: level,
        })
    }
}

/// ∫ d^w |∇^j (u/d^M)|^p over the domain, as a raw integral.
pub fn seminorm_integral<F: Separable + ?Sized>(
    u: &F,
    j: u32,
    p: f64,
    weight_exponent: f64,
    divisor_power: u32,
    domain: Domain,
    opts: &QuadOptions,
) -> Result<IntegralResult> {
    domain.admit(u)?;
    if j > u.max_order() {
        return Err(Error::out_of_range(
            "derivative order",
            j,
            "<= max_order of u",
        ));
    }
    if !(p >= 1.0) {
        return Err(Error::out_of_range("p", p, "[1, inf)"));
    }
    SeminormTask {
        u,
        j,
        p,
        w: weight_exponent,
        big_m: divisor_power,
    }
    .run(opts)
}

/// d^w |∇^j (u/d^M)|^p at a single point; used with truncated probes.
pub fn pointwise_integrand<F: Separable + ?Sized>(
    u: &F,
    j: u32,
    p: f64,
    weight_exponent: f64,
    divisor_power: u32,
    x: &[f64],
) -> f64 {
    let n = u.dim();
    let m = -(divisor_power as i32);
    let pole = (j + divisor_power) as f64;
    let xn = x[n - 1];
    if xn <= 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for beta in multi_indices(n, j) {
        let mut d = 0.0;
        for t in u.tensor_terms() {
            let mut prod = t.coefficient();
            for i in 0..n {
                let f = &t.factors()[i];
                prod *= if i + 1 == n {
                    f.scaled_power_derivative(beta[i], m, xn) * xn.powi((j - beta[i]) as i32)
                } else {
                    f.derivative(beta[i], x[i])
                };
            }
            d += prod;
        }
        s += multiplicity(&beta) * d * d;
    }
    if s == 0.0 {
        return 0.0;
    }
    ((weight_exponent - p * pole) * xn.ln() + 0.5 * p * s.ln()).exp()
}

fn sum_of_roots<F: Separable + ?Sized>(
    u: &F,
    spec: &WeightedNormSpec,
    divisor_power: u32,
    opts: &QuadOptions,
) -> Result<f64> {
    let mut total = 0.0;
    for &j in &spec.orders {
        let r = seminorm_integral(
            u,
            j,
            spec.p,
            spec.weight_exponent,
            divisor_power,
            spec.domain,
            opts,
        )?;
        total += r.value.max(0.0).powf(1.0 / spec.p);
    }
    Ok(total)
}

/// Σ_{j ∈ orders} (∫ d^w |∇^j u|^p)^{1/p}.
pub fn sobolev_norm<F: Separable + ?Sized>(
    u: &F,
    spec: &WeightedNormSpec,
    opts: &QuadOptions,
) -> Result<f64> {
    spec.validate()?;
    sum_of_roots(u, spec, 0, opts)
}

/// ‖u/d^{m−k}‖ in W^{k,q}(d^r).
pub fn quotient_norm<F: Separable + ?Sized>(
    u: &F,
    qs: &QuotientSpec,
    opts: &QuadOptions,
) -> Result<f64> {
    qs.validate()?;
    sum_of_roots(u, &qs.as_norm_spec(), qs.divisor_power, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::*;

    fn opts() -> QuadOptions {
        QuadOptions::default().with_tol(1e-10)
    }

    fn bump2d() -> TrialFunctionND {
        tensorize(
            make_poly_bump(0.2, 0.6, 6).unwrap(),
            vec![make_transverse_bump(0.0, 0.4, 6).unwrap()],
            2,
        )
        .unwrap()
    }

    #[test]
    fn linear_function_on_the_interval() {
        let u = tensorize(
            make_polynomial(vec![0.0, 1.0], 0.0, 0.5).unwrap(),
            vec![],
            1,
        )
        .unwrap();
        let spec = WeightedNormSpec::full(1, 1.0, 0.0, Domain::Interval);
        // ∫₀^{1/2} r + ∫₀^{1/2} 1
        let v = sobolev_norm(&u, &spec, &opts()).unwrap();
        assert!((v - (0.125 + 0.5)).abs() < 1e-12, "{v}");
        let wide = tensorize(
            make_polynomial(vec![0.0, 1.0], 0.0, 1.0).unwrap(),
            vec![],
            1,
        )
        .unwrap();
        assert_eq!(
            sobolev_norm(&wide, &spec, &opts()),
            Err(Error::MidlineCrossing)
        );
    }

    #[test]
    fn zero_function_norm_is_zero() {
        let u = bump2d().times(0.0);
        let spec = WeightedNormSpec::full(2, 2.0, 1.0, Domain::HalfSpace);
        assert_eq!(sobolev_norm(&u, &spec, &opts()).unwrap(), 0.0);
    }

    #[test]
    fn separable_and_tensor_paths_agree() {
        let u = bump2d();
        for j in 0..=2 {
            let fast = seminorm_integral(&u, j, 2.0, 1.0, 0, Domain::HalfSpace, &opts()).unwrap();
            let combo = TrialCombination::new(vec![u.times(0.5), u.times(0.5)]).unwrap();
            let slow =
                seminorm_integral(&combo, j, 2.0, 1.0, 0, Domain::HalfSpace, &opts()).unwrap();
            assert!((fast.value - slow.value).abs() < 1e-9 * fast.value, "j={j}");
        }
    }

    #[test]
    fn homogeneity() {
        let u = bump2d();
        let spec = WeightedNormSpec::full(2, 1.5, 0.5, Domain::HalfSpace);
        let a = sobolev_norm(&u, &spec, &opts()).unwrap();
        let b = sobolev_norm(&u.times(-3.0), &spec, &opts()).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn exact_cancellation_in_quotient() {
        // u = x_n · g(x_n) style: the polynomial r·(1 + r) divided by r is 1 + r
        let u = tensorize(
            make_polynomial(vec![0.0, 1.0, 1.0], 0.0, 0.5).unwrap(),
            vec![],
            1,
        )
        .unwrap();
        let qs = QuotientSpec::new(1, 0, 2.0, 0.0, Domain::Interval);
        let v = quotient_norm(&u, &qs, &opts()).unwrap();
        let g = tensorize(
            make_polynomial(vec![1.0, 1.0], 0.0, 0.5).unwrap(),
            vec![],
            1,
        )
        .unwrap();
        let w = sobolev_norm(
            &g,
            &WeightedNormSpec::seminorm(0, 2.0, 0.0, Domain::Interval),
            &opts(),
        )
        .unwrap();
        assert!((v - w).abs() < 1e-12, "{v} {w}");
    }

    #[test]
    fn strip_admission() {
        let u = bump2d();
        assert!(Domain::Strip.admit(&u).is_ok());
        let wide = tensorize(
            make_poly_bump(0.2, 0.6, 6).unwrap(),
            vec![make_transverse_bump(0.0, 1.2, 6).unwrap()],
            2,
        )
        .unwrap();
        assert!(matches!(
            Domain::Strip.admit(&wide),
            Err(Error::SupportOutsideDomain { .. })
        ));
    }

    #[test]
    fn pointwise_matches_direct_formula() {
        let u = bump2d();
        let x = [0.1, 0.4];
        // j = 1, M = 1, p = 2, weight 1: x_n |∇(u/x_n)|²
        let d1 = u.partial(&[1, 0], &x) / x[1];
        let d2 = u.partial(&[0, 1], &x) / x[1] - u.value(&x) / (x[1] * x[1]);
        let expect = x[1] * (d1 * d1 + d2 * d2);
        let got = pointwise_integrand(&u, 1, 2.0, 1.0, 1, &x);
        assert!((got - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(&[1, 1]), 2.0);
        assert_eq!(multiplicity(&[2, 0]), 1.0);
        assert_eq!(multiplicity(&[1, 1, 1]), 6.0);
    }
}
