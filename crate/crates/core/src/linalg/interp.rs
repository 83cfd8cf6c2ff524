use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Point counts over several prime fields, together with a bound on the
/// degree of the counting polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub points: Vec<(u64, BigInt)>,
    pub degree_bound: usize,
}

impl CountSeries {
    pub fn new(degree_bound: usize) -> Self {
        Self {
            points: Vec::new(),
            degree_bound,
        }
    }

    pub fn push(&mut self, p: u64, count: impl Into<BigInt>) {
        self.points.push((p, count.into()));
    }
}

fn lagrange_at(points: &[(u64, BigInt)], x: i64) -> Rational {
    let mut total = Rational::zero();
    for (j, (xj, yj)) in points.iter().enumerate() {
        if yj.is_zero() {
            continue;
        }
        let mut term = Rational::from_integer(yj.clone());
        for (k, (xk, _)) in points.iter().enumerate() {
            if k != j {
                term *= Rational::new(
                    BigInt::from(x) - BigInt::from(*xk),
                    BigInt::from(*xj) - BigInt::from(*xk),
                );
            }
        }
        total += term;
    }
    total
}

/// Fits the degree-`<= B` polynomial through the first `B + 1` points,
/// checks it against every remaining point, and returns its value at 1.
pub fn interpolate_eval_one(series: &CountSeries) -> Result<BigInt> {
    let b = series.degree_bound;
    let pts = &series.points;
    let context = || format!("count series {:?} (degree <= {b})", pts);
    if pts.len() < b + 2 {
        return Err(Error::Interpolation {
            context: context(),
            detail: format!("{} points, need at least {}", pts.len(), b + 2),
        });
    }
    let mut xs: Vec<u64> = pts.iter().map(|(p, _)| *p).collect();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() != pts.len() {
        return Err(Error::Interpolation {
            context: context(),
            detail: "repeated sample points".into(),
        });
    }
    let (fit, check) = pts.split_at(b + 1);
    for (x, y) in check {
        let predicted = lagrange_at(fit, *x as i64);
        if predicted != Rational::from_integer(y.clone()) {
            return Err(Error::Interpolation {
                context: context(),
                detail: format!("polynomial predicts {predicted} at {x}, observed {y}"),
            });
        }
    }
    let at_one = lagrange_at(fit, 1);
    if !at_one.denom().is_one() {
        return Err(Error::Interpolation {
            context: context(),
            detail: format!("value at q = 1 is not an integer: {at_one}"),
        });
    }
    Ok(at_one.to_integer())
}
