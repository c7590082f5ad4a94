//! Exact tools for the rank statistics of stacked persymmetric matrices over
//! the two-element field.
//!
//! The central object is a `2n x k` binary matrix built from `n` stacked
//! `2 x k` blocks, where block `i` is cut from a `(k+1)`-bit parameter word
//! as two overlapping length-`k` windows.  For each matrix size the crate can
//!
//! * enumerate all `2^(n(k+1))` parameter tuples and tally the exact rank
//!   histogram ([`engine::census`]),
//! * evaluate closed-form predictions for the same histogram as polynomials
//!   in `Y = 2^n` with exact rational coefficients ([`formulas`]),
//! * recover those polynomials from first principles by interpolation and by
//!   solving moment constraints ([`fit`]),
//! * count solutions of the associated linear systems over `F2[T]` by two
//!   independent methods ([`oracle`]).
//!
//! Everything is exact: histograms use big integers, polynomial coefficients
//! use big rationals, and no floating point appears anywhere.  Routines that
//! would enumerate a large space take an explicit budget and refuse, with a
//! cost estimate, rather than silently running for hours.

pub mod engine;
pub mod fit;
pub mod formulas;
pub mod gf2;
pub mod oracle;
pub mod rational;

pub use engine::{census, RankDistribution};
pub use formulas::CountValue;
