//! Benchmark fixtures.

use std::sync::Arc;

use semican::{DimVector, HallAlgebra, QuiverSpec, SamplingConfig, SemicanEngine};

/// Dimension vectors timed by the pipeline bench.
pub const CASES: &[(usize, &[usize])] = &[(2, &[2, 2]), (2, &[3, 3]), (3, &[1, 1, 1]), (3, &[2, 1, 1]), (3, &[2, 2, 2])];

/// Engine with an empty in-memory Hall memo.
pub fn cold_engine(n: usize) -> SemicanEngine {
    SemicanEngine::new(QuiverSpec::new(n).expect("n >= 1"), Arc::new(HallAlgebra::new()), SamplingConfig::default())
}

pub fn dim(d: &[usize]) -> DimVector {
    DimVector::new(d.to_vec())
}

pub fn label(n: usize, d: &[usize]) -> String {
    format!("n{n}/{}", dim(d))
}
