//! # povm-forge
//!
//! Mutual information of quantum measurements on finite ensembles, with the
//! convex machinery needed to reason about optimal POVMs:
//!
//! - [`hermitian`]: small dense complex matrices, the trace-orthogonal
//!   Hermitian basis, a cyclic Jacobi eigensolver, PSD checks.
//! - [`quantum`]: ensembles, POVMs, convex combination, splitting,
//!   normalization and the pretty good measurement.
//! - [`symmetry`]: finite unitary groups generated from matrices, orbits,
//!   symmetrization and the character-sum orbit-count bounds.
//! - [`infotheory`]: joint distributions, mutual information, orbit
//!   ("formal") information and the convexity equality condition.
//! - [`caratheodory`]: the design matrix, basic-feasible-solution
//!   decomposition of the identity, and POVM pruning with or without symmetry.
//! - [`trines`]: lifted and double trines drivers, scans, single- and
//!   two-orbit optimization, closed forms and the Hessian check.
//! - [`optimize`]: grid + golden-section helpers used by the drivers.
//!
//! All information values are in bits.

#![forbid(unsafe_code)]

pub mod caratheodory;
pub mod error;
pub mod hermitian;
pub mod infotheory;
pub mod optimize;
pub mod quantum;
pub mod symmetry;
pub mod trines;

pub use error::{Error, Result};
pub use hermitian::{c64, ComplexMatrix, HermitianBasis, HermitianMatrix};
pub use quantum::{Ensemble, NormalizedPovm, Povm, ValidationReport};
pub use symmetry::FiniteRep;
