//! Desk-scale laboratory for weighted Hardy–Sobolev inequalities with
//! distance weights.
//!
//! * [`opalg`]: exact subset-power, operator and recursion identities.
//! * [`funcspace`]: analytic trial functions on (0,∞) and the half-space.
//! * [`quadrature`]: graded Gauss–Legendre integration and divergence probes.
//! * [`norms`]: weighted Sobolev norms and quotient norms `u/d^{m-k}`.
//! * [`inequalities`]: the inequality catalog, hypothesis validator and ratios.
//! * [`sharpness`]: scaling sweeps, critical-case and canceling demonstrations.
//! * [`constsearch`]: derivative-free lower bounds for best constants.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constsearch;
pub mod error;
pub mod funcspace;
pub mod inequalities;
pub mod norms;
pub mod opalg;
pub mod quadrature;
pub mod rational;
pub mod sharpness;

pub use error::{Error, Result};
pub use rational::Rational;

pub use constsearch::{SearchResult, SearchSpace};
pub use funcspace::{Family, TrialFunction1D, TrialFunctionND};
pub use inequalities::{CaseId, InequalityCase, Verdict};
pub use norms::Domain;
pub use quadrature::QuadOptions;
pub use sharpness::{DivergenceRule, Growth, Setting};
