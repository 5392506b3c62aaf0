//! Numerical toolkit for the argument of Dirichlet L-functions on the
//! critical line.
//!
//! The crate computes `S(t, chi) = (1/pi) arg L(1/2 + it, chi)` by continuous
//! argument variation, enumerates Dirichlet characters and their zeros, and
//! cross-checks the explicit-formula machinery (weighted von Mangoldt sums,
//! trivial/nontrivial zero sums, kernel-weighted zero densities) that relates
//! `L'/L` to sums over zeros. An audit layer compares `|S|` against the
//! envelope `0.804 log q(t+1) / loglog q(t+3)` over grids of moduli and
//! heights and reproduces the closed-form sharp constant `0.803986...`.
//!
//! Everything works in double precision with explicit, propagated error
//! budgets; the intended scale is `q <= 100`, `|t| <= 200`.

pub mod argzeros;
pub mod audit;
pub mod characters;
mod error;
pub mod explicit;
pub mod lfunc;
pub mod numerics;
mod quadrature;
pub mod sampling;

pub use argzeros::{ArgumentTrace, Completeness, TraceSample, ZeroList, ZeroSet};
pub use audit::{AuditOutcome, AuditRow, AuditSummary, MDecomposition};
pub use characters::{DirichletCharacter, UnitGroupStructure};
pub use error::{Error, Result};
pub use explicit::{
    ExplicitFormulaParams, InequalityReport, ResidualReport, TruncatedSumResult,
    WeightedLambdaTable,
};
pub use lfunc::{CompletedValue, RootNumber};
pub use numerics::{ComplexPoint, EmConfig, EmValue};
