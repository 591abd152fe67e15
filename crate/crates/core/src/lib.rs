//! Vacuum energetics of a massless Dirac particle confined to a
//! one-dimensional box.
//!
//! The model is exactly solvable for any external perturbation V(x): each
//! eigenvalue shifts by the mean of V and the eigenmodes pick up a pure
//! phase. That innocuous spectrum hides a sharp discrepancy between two
//! pictures of the vacuum:
//!
//! - in the **filled-sea (hole-theory) picture** the vacuum energy shift
//!   is exactly zero for odd potentials, yet second-order perturbation
//!   theory with the exclusion principle enforced in intermediate states
//!   gives a strictly negative answer — the sea-internal transition term
//!   that should cancel it is a conditionally convergent double series
//!   whose value depends on the summation order;
//! - in the **field-theory picture** with normal-ordered Hamiltonians the
//!   vacuum shift is an unambiguous, strictly negative quantity built from
//!   Bogoliubov overlaps between the perturbed and unperturbed bases.
//!
//! The crate computes all of these quantities deterministically and makes
//! the disagreement a measurable artifact:
//!
//! - [`spectral`]: exact spectra, modes, matrix elements, overlaps, and an
//!   independent shooting oracle;
//! - [`numerics`]: scheme-controlled series summation, compensated/pinned
//!   reductions, adaptive oscillatory quadrature, Richardson extrapolation;
//! - [`holetheory`]: sea energy shifts, exact and perturbative, under both
//!   exclusion-principle conventions;
//! - [`qftvacuum`]: overlap blocks, the exact vacuum shift, its
//!   second-order limit, and multi-particle system shifts.
//!
//! ```
//! use diracsea::spectral::{ModelParams, LevelIndex, Potential};
//! use diracsea::spectral::{perturbed_eigenvalue_exact, unperturbed_eigenvalue};
//!
//! let params = ModelParams::new(1.0, 0.0)?;
//! let k = LevelIndex::new(1)?;
//! let pot = Potential::linear(1.0, &params);
//!
//! // an odd perturbation moves no eigenvalue at all
//! assert_eq!(
//!     perturbed_eigenvalue_exact(k, &pot, &params),
//!     unperturbed_eigenvalue(k, &params),
//! );
//! # Ok::<(), diracsea::Error>(())
//! ```

pub mod error;
pub mod holetheory;
pub mod numerics;
pub mod qftvacuum;
pub mod spectral;

pub use error::{Error, Result};
pub use numerics::{SeriesResult, SummationScheme};
pub use spectral::{LevelIndex, ModelParams, Parity, Potential, UNITS_LABEL};
