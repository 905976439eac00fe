//! Exact verification of the subset-sum power identity, the operator
//! decomposition it induces, and the vertical derivative recursion.
//!
//! Everything here is computed in exact arithmetic: a residual of zero is a
//! certificate, not an approximation.

mod diffop;
pub mod suite;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use diffop::{DiffOpPoly, MultiIndex, MAX_DIM};

use crate::error::{Error, Result};
use crate::rational::{factorial, falling_factorial, int, Rational};

/// Hard cap on k for subset enumeration (2^k subsets).
pub const MAX_SUBSET_K: usize = 16;

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::EmptyInput("scalar list a"));
    }
    if k > MAX_SUBSET_K {
        return Err(Error::out_of_range("k", k, "1..=16"));
    }
    Ok(())
}

/// Σ_{j=0}^{k} (−1)^{k−j} Σ_{#I=j} (a_I + s)^k over subsets I of {1..k}.
pub fn phi_k(a: &[Rational], s: &Rational) -> Result<Rational> {
    let k = a.len();
    check_k(k)?;
    let mut total = Rational::zero();
    for mask in 0u32..(1u32 << k) {
        let mut sum = s.clone();
        for (i, ai) in a.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += ai;
            }
        }
        let term = num_traits::pow(sum, k);
        // (−1)^{k−#I}
        if (k as u32 - mask.count_ones()).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// φ_k(a, s) − k!·∏aᵢ; zero certifies the identity for this input.
pub fn combinatorial_residual(a: &[Rational], s: &Rational) -> Result<Rational> {
    let phi = phi_k(a, s)?;
    let prod = a.iter().fold(Rational::one(), |acc, x| acc * x);
    let kfact = Rational::from_integer(factorial(a.len() as u32));
    Ok(phi - kfact * prod)
}

/// Expands both sides of the operator decomposition
///
/// k!·∏ᵢ ∂_{jᵢ} = Σ_l (−1)^{k−l} Σ_{#I=l} (Σ_{i∈I} ∂_{jᵢ} + ∂ₙ)^k
///
/// into normal form. Directions are counted from 1.
pub fn expand_operator_identity(j: &[usize], n: usize) -> Result<(DiffOpPoly, DiffOpPoly)> {
    let k = j.len();
    check_k(k)?;
    if n == 0 || n > MAX_DIM {
        return Err(Error::out_of_range("dimension", n, "1..=8"));
    }
    if let Some(&bad) = j.iter().find(|&&ji| ji == 0 || ji > n) {
        return Err(Error::out_of_range("direction index", bad, "1..=n"));
    }
    let symbols: Vec<DiffOpPoly> = j
        .iter()
        .map(|&ji| DiffOpPoly::symbol(n, ji))
        .collect::<Result<_>>()?;
    let normal = DiffOpPoly::symbol(n, n)?;

    let lhs = symbols
        .iter()
        .fold(DiffOpPoly::constant(n, factorial(k as u32))?, |acc, s| {
            &acc * s
        });

    let mut rhs = DiffOpPoly::zero(n)?;
    for mask in 0u32..(1u32 << k) {
        let mut inner = normal.clone();
        for (i, s) in symbols.iter().enumerate() {
            if mask & (1 << i) != 0 {
                inner = &inner + s;
            }
        }
        let term = inner.pow(k as u32);
        rhs = if (k as u32 - mask.count_ones()).is_multiple_of(2) {
            &rhs + &term
        } else {
            &rhs - &term
        };
    }
    Ok((lhs, rhs))
}

/// Coefficients cᵢ of the j-fold iterate of
/// ∂ₙ^l(u/xₙ^M) = xₙ^{-1}[∂ₙ^l(u/xₙ^{M−1}) − l ∂ₙ^{l−1}(u/xₙ^M)],
/// so that ∂ₙ^l(u/xₙ^M) = xₙ^{−j} Σᵢ cᵢ ∂ₙ^i(u/xₙ^{M+l−i−j}).
///
/// Keys run over max(0, l−j) ..= l. The coefficients do not depend on M.
pub fn vertical_recursion_coeffs(l: u32, j: u32) -> Result<BTreeMap<u32, Rational>> {
    if l == 0 {
        return Err(Error::out_of_range("derivative order l", l, ">= 1"));
    }
    if j == 0 {
        return Err(Error::out_of_range("iteration depth j", j, ">= 1"));
    }
    // c[i] for i in 0..=l; entries below the active range stay zero.
    let mut c: Vec<BigInt> = vec![BigInt::zero(); l as usize + 1];
    c[l as usize] = BigInt::one();
    for _ in 0..j {
        let mut next = c.clone();
        for i in 0..l as usize {
            // a term ∂^{i+1} sheds −(i+1)·∂^{i}; order-0 terms only gain a 1/x factor
            next[i] -= BigInt::from(i as u64 + 1) * &c[i + 1];
        }
        c = next;
    }
    let lo = l.saturating_sub(j);
    Ok((lo..=l)
        .map(|i| (i, Rational::from_integer(c[i as usize].clone())))
        .collect())
}

/// Substitutes u = xₙ^N into both sides of the iterated recursion and returns
/// the difference of the (common) coefficients of xₙ^{N−M−l}, M = m − k.
pub fn monomial_recursion_check(big_n: i64, m: u32, k: u32, l: u32, j: u32) -> Result<Rational> {
    let coeffs = vertical_recursion_coeffs(l, j)?;
    monomial_residual_with(&coeffs, big_n, m, k, l, j)
}

pub(crate) fn monomial_residual_with(
    coeffs: &BTreeMap<u32, Rational>,
    big_n: i64,
    m: u32,
    k: u32,
    l: u32,
    j: u32,
) -> Result<Rational> {
    if m < 2 {
        return Err(Error::out_of_range("m", m, ">= 2"));
    }
    if k == 0 || k >= m {
        return Err(Error::out_of_range("k", k, "1..=m-1"));
    }
    let big_m = (m - k) as i64;
    let (l_i, j_i) = (l as i64, j as i64);
    // ∂^l x^{N−M} = ff(N−M, l) x^{N−M−l}
    let lhs = Rational::from_integer(falling_factorial(big_n - big_m, l));
    let mut rhs = Rational::zero();
    for (&i, c) in coeffs {
        let exponent = big_n - (big_m + l_i - i as i64 - j_i);
        rhs += c * Rational::from_integer(falling_factorial(exponent, i));
    }
    Ok(lhs - rhs)
}

/// k! as a rational, handy for callers comparing against φ_k.
pub fn factorial_rational(k: u32) -> Rational {
    Rational::from_integer(factorial(k))
}

/// ∏ aᵢ.
pub fn product(a: &[Rational]) -> Rational {
    a.iter().fold(int(1), |acc, x| acc * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn residual_examples() {
        assert!(combinatorial_residual(&ints(&[3]), &int(7))
            .unwrap()
            .is_zero());
        assert!(combinatorial_residual(&ints(&[1, 2]), &int(0))
            .unwrap()
            .is_zero());
        assert!(combinatorial_residual(&ints(&[1, 1, 1]), &int(1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_k(&ints(&[3]), &int(0)).unwrap(), int(3));
        assert_eq!(phi_k(&ints(&[1, 2]), &int(5)).unwrap(), int(4));
        assert_eq!(phi_k(&ints(&[2, 0]), &int(1)).unwrap(), int(0));
        assert_eq!(
            phi_k(&[frac(1, 2), frac(-2, 3)], &frac(7, 5)).unwrap(),
            frac(-2, 3)
        );
    }

    #[test]
    fn empty_and_oversized_inputs_are_rejected() {
        assert!(matches!(
            combinatorial_residual(&[], &int(0)),
            Err(Error::EmptyInput(_))
        ));
        assert!(phi_k(&ints(&[1; 17]), &int(0)).is_err());
    }

    #[test]
    fn operator_examples() {
        let (l, r) = expand_operator_identity(&[1, 1], 2).unwrap();
        assert_eq!(l, r);
        assert_eq!(l.coefficient(&[2, 0]), BigInt::from(2));
        assert_eq!(l.len(), 1);

        let (l, r) = expand_operator_identity(&[1], 3).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, DiffOpPoly::symbol(3, 1).unwrap());

        let (l, r) = expand_operator_identity(&[1, 2, 2], 3).unwrap();
        assert_eq!(l, r);
        assert_eq!(l.coefficient(&[1, 2, 0]), BigInt::from(6));
    }

    #[test]
    fn operator_index_out_of_range() {
        assert!(expand_operator_identity(&[0], 2).is_err());
        assert!(expand_operator_identity(&[3], 2).is_err());
        assert!(expand_operator_identity(&[1], 0).is_err());
    }

    #[test]
    fn recursion_coefficient_examples() {
        let c = vertical_recursion_coeffs(1, 1).unwrap();
        assert_eq!(c, BTreeMap::from([(0, int(-1)), (1, int(1))]));
        let c = vertical_recursion_coeffs(2, 1).unwrap();
        assert_eq!(c, BTreeMap::from([(1, int(-2)), (2, int(1))]));
        // composing the depth-1 step twice
        let c = vertical_recursion_coeffs(2, 2).unwrap();
        assert_eq!(c, BTreeMap::from([(0, int(2)), (1, int(-4)), (2, int(1))]));
        // j > l floors at i = 0
        let c = vertical_recursion_coeffs(1, 3).unwrap();
        assert_eq!(c.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert!(vertical_recursion_coeffs(0, 1).is_err());
        assert!(vertical_recursion_coeffs(1, 0).is_err());
    }

    #[test]
    fn monomial_examples() {
        assert!(monomial_recursion_check(5, 3, 1, 1, 1).unwrap().is_zero());
        assert!(monomial_recursion_check(7, 4, 2, 3, 1).unwrap().is_zero());
        assert!(monomial_recursion_check(6, 3, 2, 2, 2).unwrap().is_zero());
        // negative powers of x are still exact
        assert!(monomial_recursion_check(0, 5, 1, 4, 3).unwrap().is_zero());
        assert!(monomial_recursion_check(5, 3, 3, 1, 1).is_err());
    }

    #[test]
    fn perturbed_coefficients_are_detected() {
        let mut c = vertical_recursion_coeffs(3, 2).unwrap();
        *c.get_mut(&2).unwrap() += int(1);
        let res = monomial_residual_with(&c, 9, 4, 1, 3, 2).unwrap();
        assert!(!res.is_zero());
    }
}
