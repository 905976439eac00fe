//! Seeded compass search for large Rayleigh ratios over parametric trial
//! families. Best ratios found are lower bounds for the optimal constant.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{
    make_log_family_with_power, make_poly_bump, make_transverse_bump, tensorize, Separable,
    TrialCombination, TrialFunctionND,
};
use crate::inequalities::{case_sides, hardy_upper_bound, validate_params, CaseId, InequalityCase};
use crate::quadrature::QuadOptions;
use crate::rational::to_f64;

/// Closed parameter interval; `lo == hi` pins the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        Bounds { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        Bounds { lo: v, hi: v }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Optional log-family component added with weight `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogMix {
    pub weight: Bounds,
    pub alpha: f64,
    pub eps_cut: f64,
    #[serde(default = "one")]
    pub r_power: i32,
}

fn one() -> i32 {
    1
}

/// Trial template: a vertical bump on [a, a + len] of fixed degree, times
/// transverse bumps of the given half-width, plus an optional log term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub degree: u32,
    pub a: Bounds,
    pub len: Bounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse_half_width: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_mix: Option<LogMix>,
    pub budget: usize,
    pub seed: u64,
}

impl SearchSpace {
    /// One-dimensional bump template of the given degree.
    pub fn bump_1d(degree: u32, a: Bounds, len: Bounds, budget: usize, seed: u64) -> Self {
        SearchSpace {
            degree,
            a,
            len,
            transverse_half_width: None,
            log_mix: None,
            budget,
            seed,
        }
    }

    fn params(&self) -> Vec<(&'static str, Bounds)> {
        let mut v = vec![("a", self.a), ("len", self.len)];
        if let Some(w) = self.transverse_half_width {
            v.push(("transverse_half_width", w));
        }
        if let Some(mix) = self.log_mix {
            v.push(("log_weight", mix.weight));
        }
        v
    }

    fn validate(&self, n: usize, order: u32) -> Result<()> {
        if self.degree < order + 1 {
            return Err(Error::out_of_range(
                "bump degree",
                self.degree,
                "> derivative order of the case",
            ));
        }
        if self.budget == 0 {
            return Err(Error::out_of_range("budget", 0, ">= 1"));
        }
        for (name, b) in self.params() {
            if !(b.lo <= b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
                return Err(Error::OutOfRange {
                    what: "search bounds",
                    value: format!("{name} in [{}, {}]", b.lo, b.hi),
                    expected: "finite lo <= hi",
                });
            }
        }
        if !(self.a.lo > 0.0) {
            return Err(Error::out_of_range("a lower bound", self.a.lo, "> 0"));
        }
        if !(self.len.lo > 0.0) {
            return Err(Error::out_of_range("len lower bound", self.len.lo, "> 0"));
        }
        if n > 1 && self.transverse_half_width.is_none() {
            return Err(Error::Hypothesis(
                "n > 1 needs transverse_half_width bounds".into(),
            ));
        }
        Ok(())
    }

    fn build(&self, n: usize, x: &[f64]) -> Result<Combo> {
        let (a, len) = (x[0], x[1]);
        let hw = self.transverse_half_width.map(|_| x[2]);
        let transverse = |hw: Option<f64>| -> Result<Vec<_>> {
            (1..n)
                .map(|_| make_transverse_bump(0.0, hw.expect("validated"), self.degree))
                .collect()
        };
        let bump = tensorize(make_poly_bump(a, a + len, self.degree)?, transverse(hw)?, n)?;
        match self.log_mix {
            None => Ok(Combo::Single(bump)),
            Some(mix) => {
                let w = *x.last().expect("log weight");
                let f = make_log_family_with_power(mix.alpha, mix.eps_cut, mix.r_power)?;
                let log = tensorize(f, transverse(hw)?, n)?.times(w);
                Ok(Combo::Mixed(TrialCombination::new(vec![bump, log])?))
            }
        }
    }
}

enum Combo {
    Single(TrialFunctionND),
    Mixed(TrialCombination),
}

impl Combo {
    fn as_separable(&self) -> &dyn Separable {
        match self {
            Combo::Single(u) => u,
            Combo::Mixed(u) => u,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub index: usize,
    pub params: Vec<f64>,
    /// None when the evaluation failed.
    pub ratio: Option<f64>,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub case: InequalityCase,
    pub param_names: Vec<String>,
    pub best_params: Vec<f64>,
    pub best_ratio: f64,
    pub evaluations: usize,
    /// "budget", "stagnation" or "step".
    pub stop_reason: String,
    /// Known upper bound for the best constant, when available.
    pub analytic_upper_bound: Option<f64>,
    pub gap: Option<f64>,
    /// Parameters whose best value sits on a box edge.
    pub at_boundary: Vec<String>,
    pub trace: Vec<TraceEntry>,
}

/// Proposals without relative improvement above `tol` before stopping.
pub const STAGNATION_WINDOW: usize = 20;

/// Ratio of `case` at one parameter point.
pub fn evaluate_at(
    case: &InequalityCase,
    space: &SearchSpace,
    params: &[f64],
    opts: &QuadOptions,
) -> Result<f64> {
    let n = case_dim(case);
    let u = space.build(n, params)?;
    let (l, r) = case_sides(case, u.as_separable(), opts)?;
    if r.value > 0.0 {
        Ok(l.value / r.value)
    } else {
        Err(Error::Degenerate("right side vanishes"))
    }
}

fn required_order(case: &InequalityCase) -> u32 {
    match case.id {
        CaseId::Classical1 => 1,
        CaseId::Second2 => 2,
        _ => case.m.unwrap_or(0),
    }
}

fn case_dim(case: &InequalityCase) -> usize {
    match case.id {
        CaseId::Classical1 | CaseId::Second2 | CaseId::OneD => 1,
        _ => case.n.unwrap_or(1) as usize,
    }
}

/// Compass search in the unit cube mapped onto the bounds.
///
/// Starts from a seeded point, polls ±step along each free coordinate in a
/// seeded order, evaluates each poll batch concurrently and accepts in
/// proposal order. The step halves after an unsuccessful poll.
pub fn maximize_ratio(
    case: &InequalityCase,
    space: &SearchSpace,
    tol: f64,
    opts: &QuadOptions,
) -> Result<SearchResult> {
    let verdict = validate_params(case);
    if !verdict.valid {
        return Err(Error::Hypothesis(verdict.violated.join(", ")));
    }
    let n = case_dim(case);
    space.validate(n, required_order(case))?;
    let params = space.params();
    let dim = params.len();
    let to_x = |z: &[f64]| -> Vec<f64> {
        z.iter()
            .zip(&params)
            .map(|(zi, (_, b))| b.lo + zi.clamp(0.0, 1.0) * b.width())
            .collect()
    };
    let free: Vec<usize> = (0..dim).filter(|&i| params[i].1.width() > 0.0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    let mut z: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.25..0.75)).collect();

    let eval = |z: &[f64]| {
        evaluate_at(case, space, &to_x(z), opts)
            .ok()
            .filter(|r| r.is_finite())
    };
    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut best_z = z.clone();
    let record = |trace: &mut Vec<TraceEntry>, zp: &[f64], ratio: Option<f64>, best: &mut f64| {
        if let Some(r) = ratio {
            if r > *best {
                *best = r;
            }
        }
        trace.push(TraceEntry {
            index: trace.len(),
            params: to_x(zp),
            ratio,
            best_so_far: *best,
        });
    };

    let first = eval(&z);
    record(&mut trace, &z, first, &mut best);
    let mut step = 0.25;
    let mut since_gain = 0usize;
    let stop_reason;
    loop {
        if trace.len() >= space.budget {
            stop_reason = "budget";
            break;
        }
        if free.is_empty() || step < 1e-6 {
            stop_reason = "step";
            break;
        }
        if since_gain >= STAGNATION_WINDOW {
            stop_reason = "stagnation";
            break;
        }
        let mut order = free.clone();
        order.shuffle(&mut rng);
        let mut proposals: Vec<Vec<f64>> = Vec::new();
        for &i in &order {
            for sign in [1.0, -1.0] {
                let mut zp = z.clone();
                zp[i] = (zp[i] + sign * step).clamp(0.0, 1.0);
                if zp[i] != z[i] {
                    proposals.push(zp);
                }
            }
        }
        proposals.truncate(space.budget - trace.len());
        let ratios: Vec<Option<f64>> = proposals.par_iter().map(|zp| eval(zp)).collect();
        let mut moved = false;
        for (zp, ratio) in proposals.iter().zip(ratios) {
            let before = best;
            record(&mut trace, zp, ratio, &mut best);
            let gain = if before.is_finite() {
                (best - before) / before.abs().max(f64::MIN_POSITIVE)
            } else if best.is_finite() {
                f64::INFINITY
            } else {
                0.0
            };
            if best > before {
                best_z = zp.clone();
                moved = true;
            }
            if gain > tol {
                since_gain = 0;
            } else {
                since_gain += 1;
            }
        }
        if moved {
            z = best_z.clone();
        } else {
            step *= 0.5;
        }
    }
    if !best.is_finite() {
        return Err(Error::SearchFailed {
            evaluations: trace.len(),
        });
    }
    let best_params = to_x(&best_z);
    let at_boundary = free
        .iter()
        .filter(|&&i| best_z[i] <= 0.0 || best_z[i] >= 1.0)
        .map(|&i| params[i].0.to_string())
        .collect();
    let analytic_upper_bound = match (case.id, case.m, case.k, &case.p, &case.alpha) {
        (CaseId::OneD, Some(m), Some(k), Some(p), Some(alpha)) => {
            hardy_upper_bound(m, k, p, alpha).ok().map(|c| to_f64(&c))
        }
        _ => None,
    };
    Ok(SearchResult {
        case: case.clone(),
        param_names: params.iter().map(|(n, _)| n.to_string()).collect(),
        best_params,
        best_ratio: best,
        evaluations: trace.len(),
        stop_reason: stop_reason.to_string(),
        analytic_upper_bound,
        gap: analytic_upper_bound.map(|c| c - best),
        at_boundary,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn one_d() -> InequalityCase {
        InequalityCase::one_d(2, 1, int(2), int(0))
    }

    #[test]
    fn one_point_box_returns_its_ratio() {
        let space = SearchSpace::bump_1d(3, Bounds::fixed(1.0), Bounds::fixed(1.0), 50, 3);
        let opts = QuadOptions::default();
        let res = maximize_ratio(&one_d(), &space, 1e-6, &opts).unwrap();
        assert_eq!(res.evaluations, 1);
        let direct = evaluate_at(&one_d(), &space, &[1.0, 1.0], &opts).unwrap();
        assert_eq!(res.best_ratio, direct);
    }

    #[test]
    fn zero_budget_and_invalid_case_rejected() {
        let opts = QuadOptions::default();
        let space = SearchSpace::bump_1d(3, Bounds::new(0.5, 1.0), Bounds::new(0.5, 2.0), 0, 1);
        assert!(maximize_ratio(&one_d(), &space, 1e-6, &opts).is_err());
        let space = SearchSpace::bump_1d(3, Bounds::new(0.5, 1.0), Bounds::new(0.5, 2.0), 10, 1);
        let bad = InequalityCase::one_d(2, 1, int(1), int(1));
        assert!(matches!(
            maximize_ratio(&bad, &space, 1e-6, &opts),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn best_is_monotone_and_bounded() {
        let space = SearchSpace::bump_1d(3, Bounds::new(0.05, 2.0), Bounds::new(0.1, 5.0), 40, 11);
        let res = maximize_ratio(&one_d(), &space, 1e-6, &QuadOptions::default()).unwrap();
        assert!(res
            .trace
            .windows(2)
            .all(|w| w[1].best_so_far >= w[0].best_so_far));
        assert!(res.trace.len() <= 40);
        assert!(res.best_ratio <= 2.0 / 3.0 + 1e-6);
    }
}
