//! Batch runner for the exact identity checks.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    combinatorial_residual, expand_operator_identity, monomial_residual_with, phi_k,
    vertical_recursion_coeffs,
};
use crate::error::{Error, Result};
use crate::rational::{format_rational, random_small, Rational};

/// Largest k accepted by the suite.
pub const SUITE_MAX_K: usize = 8;
/// Largest dimension accepted by the suite.
pub const SUITE_MAX_N: usize = 4;
/// Operator tuples are enumerated exhaustively only up to this length.
pub const OPERATOR_MAX_K: usize = 4;

#[derive(Debug, Clone)]
pub struct IdentitySuiteConfig {
    pub k_max: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Fault injection: bumps one recursion coefficient so the suite must fail.
    pub perturb: bool,
}

impl Default for IdentitySuiteConfig {
    fn default() -> Self {
        IdentitySuiteConfig {
            k_max: SUITE_MAX_K,
            n_max: SUITE_MAX_N,
            trials: 100,
            seed: 7,
            perturb: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteSection {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteSection {
    fn new(name: &str) -> Self {
        SuiteSection {
            name: name.to_string(),
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IdentitySuiteReport {
    pub seed: u64,
    pub k_max: usize,
    pub n_max: usize,
    pub trials: usize,
    pub sections: Vec<SuiteSection>,
}

impl IdentitySuiteReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.failures.is_empty())
    }

    pub fn total_checked(&self) -> usize {
        self.sections.iter().map(|s| s.checked).sum()
    }
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn run_identity_suite(cfg: &IdentitySuiteConfig) -> Result<IdentitySuiteReport> {
    if cfg.k_max == 0 || cfg.k_max > SUITE_MAX_K {
        return Err(Error::out_of_range("k_max", cfg.k_max, "1..=8"));
    }
    if cfg.n_max == 0 || cfg.n_max > SUITE_MAX_N {
        return Err(Error::out_of_range("n_max", cfg.n_max, "1..=4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut subset = SuiteSection::new("subset_power_identity");
    let mut constancy = SuiteSection::new("phi_constancy");
    for k in 1..=cfg.k_max {
        for _ in 0..cfg.trials {
            let a: Vec<Rational> = (0..k).map(|_| random_small(&mut rng)).collect();
            let s = random_small(&mut rng);
            let res = combinatorial_residual(&a, &s)?;
            subset.record(res.is_zero(), || {
                format!(
                    "a={} s={} residual={}",
                    show(&a),
                    format_rational(&s),
                    format_rational(&res)
                )
            });
            let s2 = random_small(&mut rng);
            let (p1, p2) = (phi_k(&a, &s)?, phi_k(&a, &s2)?);
            constancy.record(p1 == p2, || {
                format!(
                    "a={} s1={} s2={}",
                    show(&a),
                    format_rational(&s),
                    format_rational(&s2)
                )
            });
        }
    }

    let mut operator = SuiteSection::new("operator_decomposition");
    for n in 1..=cfg.n_max {
        for k in 1..=cfg.k_max.min(OPERATOR_MAX_K) {
            let mut j = vec![1usize; k];
            loop {
                let (lhs, rhs) = expand_operator_identity(&j, n)?;
                operator.record(lhs == rhs, || format!("n={n} j={j:?}"));
                // odometer over {1..n}^k
                let mut pos = 0;
                while pos < k && j[pos] == n {
                    j[pos] = 1;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
                j[pos] += 1;
            }
        }
    }

    let mut recursion = SuiteSection::new("vertical_recursion");
    for m in 2..=6u32 {
        for k in 1..m {
            for l in 1..=6u32 {
                for j in 1..=l {
                    let mut coeffs = vertical_recursion_coeffs(l, j)?;
                    if cfg.perturb {
                        if let Some(top) = coeffs.get_mut(&l) {
                            *top += Rational::one();
                        }
                    }
                    for big_n in (m as i64 + 1)..=(m as i64 + 6) {
                        let res = monomial_residual_with(&coeffs, big_n, m, k, l, j)?;
                        recursion.record(res.is_zero(), || {
                            format!(
                                "N={big_n} m={m} k={k} l={l} j={j} residual={}",
                                format_rational(&res)
                            )
                        });
                    }
                }
            }
        }
    }

    Ok(IdentitySuiteReport {
        seed: cfg.seed,
        k_max: cfg.k_max,
        n_max: cfg.n_max,
        trials: cfg.trials,
        sections: vec![subset, constancy, operator, recursion],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cfg = IdentitySuiteConfig {
            k_max: 4,
            n_max: 3,
            trials: 10,
            ..Default::default()
        };
        let rep = run_identity_suite(&cfg).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let op = &rep.sections[2];
        assert_eq!(
            op.checked,
            (1 + 1 + 1 + 1) + (2 + 4 + 8 + 16) + (3 + 9 + 27 + 81)
        );
    }

    #[test]
    fn perturbation_is_caught() {
        let cfg = IdentitySuiteConfig {
            k_max: 2,
            n_max: 2,
            trials: 2,
            perturb: true,
            ..Default::default()
        };
        let rep = run_identity_suite(&cfg).unwrap();
        assert!(!rep.passed());
        assert!(!rep.sections[3].failures.is_empty());
    }

    #[test]
    fn bounds_are_enforced() {
        let mut cfg = IdentitySuiteConfig {
            k_max: 0,
            ..Default::default()
        };
        assert!(run_identity_suite(&cfg).is_err());
        cfg.k_max = 9;
        assert!(run_identity_suite(&cfg).is_err());
        cfg.k_max = 3;
        cfg.n_max = 5;
        assert!(run_identity_suite(&cfg).is_err());
    }
}
