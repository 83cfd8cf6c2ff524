//! The Hall algebra of the quiver at `q = 1`.

mod algebra;
mod cache;
mod counts;
mod rep;

pub use algebra::{head_extensions, HallAlgebra, PbwVector, PbwWordTable, SerreReport, WordCombo};
pub use cache::{CacheStats, CacheVerification, HallCache, CACHE_FILE};
pub use counts::hall_counts_simple_top;
pub(crate) use counts::replace_vertex_space;
pub use rep::{iso_class, realize, RepMatrices};
