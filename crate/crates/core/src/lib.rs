//! Exact computation of the transition matrix between the PBW basis and the
//! semicanonical basis of `U^+(sl_{n+1})`, for the linearly oriented quiver
//! `1 -> 2 -> ... -> n`.
//!
//! The crate is layered bottom-up:
//!
//! - [`quiver`]: multisegments, Hom dimensions, the degeneration order,
//!   `t_i`, peeling, generic extensions and total generic flags.
//! - [`linalg`]: exact rationals, prime-field matrices, subspace
//!   enumeration and Euler-characteristic extraction by interpolation.
//! - [`hall`]: the Hall algebra at `q = 1` acting on PBW coordinates.
//! - [`lambda`]: generic points of the components of the nilpotent variety
//!   of the preprojective algebra and evaluation of constructible functions.
//! - [`semican`]: the semicanonical basis in PBW coordinates, computed by
//!   two independent routes and certified.

pub mod error;
pub mod hall;
pub mod lambda;
pub mod linalg;
pub mod oracle;
pub mod quiver;
pub mod report;
pub mod selftest;
pub mod semican;

pub use error::{Error, Result};
pub use hall::{HallAlgebra, HallCache, PbwVector, RepMatrices, WordCombo};
pub use lambda::{LambdaModule, LambdaPoint, LambdaSampler, SamplingConfig};
pub use linalg::{PrimeMatrix, QMatrix, Rational};
pub use quiver::{DimVector, Letter, Multisegment, QuiverSpec, Segment, Word};
pub use report::TransitionReport;
pub use semican::{EvaluationMatrix, SemicanEngine, SemicanElement, TransitionMatrix};
