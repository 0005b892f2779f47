//! Quadratic transformations between the `2^m`-dimensional isotropic
//! oscillator and the `(2^(m−1)+1)`-dimensional hydrogen-like atom.
//!
//! - [`transforms`]: signed-index templates, the coordinate map and exact
//!   axiom checks.
//! - [`operators`]: finite-difference calculus, φ operators and the Laplacian
//!   factorization on pullbacks.
//! - [`spectra`]: closed-form dual spectra and the parametric bridge.
//! - [`solver`]: a radial Schrödinger eigensolver in arbitrary dimension.
//! - [`suite`]: seeded verification suites shared by the CLI and tests.

pub mod error;
pub mod format;
pub mod operators;
pub mod rng;
pub mod solver;
pub mod spectra;
pub mod suite;
pub mod transforms;

pub use error::{Error, Result};
pub use transforms::{
    build_matrix, check_divergence, check_orthogonality, family_params, map_point, AtomPoint,
    FamilyDescriptor, OscPoint, SignedIndex, SignedIndexMatrix, Transform,
};
