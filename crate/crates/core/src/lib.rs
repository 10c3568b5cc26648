//! Broken k-diamond partition numbers, three independent ways.
//!
//! The partition counts Delta_k(n) have the eta-quotient generating function
//!
//! ```text
//! sum Delta_k(n) q^n = prod (1 - q^{2n})(1 - q^{(2k+1)n})
//!                         / ((1 - q^n)^3 (1 - q^{(4k+2)n}))
//! ```
//!
//! This crate computes them by
//! - exact big-integer series expansion ([`series`]),
//! - a truncated Rademacher-type exact formula with rigorous term
//!   enclosures ([`circle`]),
//! - an asymptotic main term with a certified error envelope
//!   ([`asymptotics`]),
//!
//! and verifies inequality families (Turan of any order, Laguerre, forward
//! differences, log-concavity with a certified threshold, multiplicativity)
//! over desk-scale sweeps ([`inequalities`]). All analytic quantities are
//! carried as midpoint-radius enclosures ([`ball`]); all combinatorial and
//! modular data is exact ([`dedekind`]).

pub mod acceptance;
pub mod asymptotics;
pub mod ball;
pub mod bessel;
pub mod circle;
pub mod dedekind;
pub mod inequalities;
pub mod poly;
pub mod series;

pub use ball::{Ball, ComplexBall, Prec};
pub use series::{CoeffTable, SeriesKind, TableCache};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("h={h} and j={j} must be coprime")]
    NonCoprime { h: i64, j: u64 },
    #[error("table cutoff {cutoff} too small for n={n}")]
    CutoffTooSmall { n: u64, cutoff: u64 },
    #[error("n={n} violates the lower bound n > (k+1)/12 for k={k}")]
    InvalidN { k: u32, n: u64 },
    #[error("k={k} out of range: {requirement}")]
    KOutOfRange { k: u32, requirement: &'static str },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series convergence violated: {0}")]
    Convergence(String),
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
