//! Polynomials with integer coefficients in commuting derivative symbols.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest supported number of symbols.
pub const MAX_DIM: usize = 8;

/// Exponent vector of a monomial in the symbols ∂₁, …, ∂ₙ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn from_slice(v: &[u32]) -> Self {
        MultiIndex(v.to_vec())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// A polynomial in commuting symbols ∂₁, …, ∂ₙ with integer coefficients.
///
/// Stored sparsely as multi-index → coefficient; zero coefficients are never
/// kept, so structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOpPoly {
    n: usize,
    terms: BTreeMap<MultiIndex, BigInt>,
}

impl DiffOpPoly {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::out_of_range("dimension", n, "1..=8"));
        }
        Ok(DiffOpPoly {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Result<Self> {
        let mut p = Self::zero(n)?;
        p.add_term(MultiIndex::zero(n), c.into());
        Ok(p)
    }

    /// The symbol ∂ᵢ, with `i` counted from 1.
    pub fn symbol(n: usize, i: usize) -> Result<Self> {
        let mut p = Self::zero(n)?;
        if i == 0 || i > n {
            return Err(Error::out_of_range("direction index", i, "1..=n"));
        }
        p.add_term(MultiIndex::unit(n, i - 1), BigInt::one());
        Ok(p)
    }

    /// Builds a polynomial from (exponents, coefficient) pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Self::zero(n)?;
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: e.len(),
                });
            }
            p.add_term(MultiIndex(e), c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms
            .get(&MultiIndex::from_slice(exps))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    fn add_term(&mut self, e: MultiIndex, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &DiffOpPoly) {
        assert_eq!(
            self.n, other.n,
            "operator polynomials live in different dimensions"
        );
    }

    pub fn scale(&self, c: &BigInt) -> DiffOpPoly {
        if c.is_zero() {
            return DiffOpPoly {
                n: self.n,
                terms: BTreeMap::new(),
            };
        }
        DiffOpPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> DiffOpPoly {
        let mut acc = DiffOpPoly {
            n: self.n,
            terms: BTreeMap::from([(MultiIndex::zero(self.n), BigInt::one())]),
        };
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Add for &DiffOpPoly {
    type Output = DiffOpPoly;
    fn add(self, rhs: &DiffOpPoly) -> DiffOpPoly {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DiffOpPoly {
    type Output = DiffOpPoly;
    fn sub(self, rhs: &DiffOpPoly) -> DiffOpPoly {
        self + &(-rhs)
    }
}

impl Neg for &DiffOpPoly {
    type Output = DiffOpPoly;
    fn neg(self) -> DiffOpPoly {
        DiffOpPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &DiffOpPoly {
    type Output = DiffOpPoly;
    fn mul(self, rhs: &DiffOpPoly) -> DiffOpPoly {
        self.check_dim(rhs);
        let mut out = DiffOpPoly {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.plus(eb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for DiffOpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = e
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    if p == 1 {
                        format!("d{}", i + 1)
                    } else {
                        format!("d{}^{}", i + 1, p)
                    }
                })
                .collect();
            if !mag.is_one() || factors.is_empty() {
                factors.insert(0, mag.to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
