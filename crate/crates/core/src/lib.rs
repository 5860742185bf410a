//! Numerical machinery for transferring the triangular projection of `S¹_d`
//! into `H¹(S¹_d)` through finite-rank Fourier-multiplier decompositions.
//!
//! The crate is organised bottom-up:
//!
//! * [`torus`]: scalar and matrix-valued trigonometric polynomials, the `L¹`
//!   and `H¹(S¹_d)` norms by equispaced quadrature.
//! * [`schatten`]: trace norms, the triangular truncation, the diagonal
//!   modulation `Z = diag(e_α) X diag(e_β)`, and lower bounds for the
//!   `S¹_d → S¹_d` norm of linear matrix maps.
//! * [`decomposition`]: finite-rank multiplier decompositions of the identity,
//!   the dyadic de la Vallée-Poussin (Stein) instance, sign-pattern sums and
//!   unconditionality probes.
//! * [`construction`]: the inductive frequency selection producing `α`, `β`,
//!   the `{0,1}` mask and the `ε_n` schedule, together with transfer
//!   certificates bounding the completely unconditional constant from below.

pub mod construction;
pub mod decomposition;
mod error;
pub mod freq;
pub mod schatten;
pub mod seed;
pub mod stats;
pub mod torus;

pub use error::{Error, Result};
pub use freq::Freq;
