//! Error type shared across the crate.

/// Errors produced by spectral, summation, and quadrature routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A constructor was handed an argument outside its domain
    /// (`a <= 0`, `m != 0`, `k == 0`, malformed scheme, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive panel refinement hit the panel budget before the
    /// requested tolerance was met.
    #[error("quadrature did not converge: {panels} panels, last delta {last_delta:.3e}")]
    QuadratureNotConverged { panels: usize, last_delta: f64 },

    /// The term count implied by a summation scheme exceeds the
    /// configured budget ([`crate::numerics::TERM_BUDGET`]).
    #[error("series budget exceeded: {requested} terms requested, budget is {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },

    /// The shooting solver's bracket contains no boundary-condition root.
    #[error("no boundary-condition root in [{lo:.6}, {hi:.6}] for level {level}")]
    NoRootInBracket { level: i32, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
