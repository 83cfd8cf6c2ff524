//! Exact arithmetic: rationals, prime-field matrices, subspace enumeration,
//! interpolation at `q = 1`.

mod ff;
mod interp;
mod primes;
mod rational;
mod subspace;

pub use ff::{rank_ff, solve_affine_ff, PrimeMatrix, Rref};
pub use interp::{interpolate_eval_one, CountSeries};
pub use primes::{is_prime, primes_from};
pub use rational::{invert_unitriangular, parse_rational, rational_to_string, QMatrix, Rational};
pub use subspace::{gaussian_binomial, subspaces_ff, Subspaces};
