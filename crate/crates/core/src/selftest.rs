//! Regression and oracle suites, runnable from the command line.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::hall::{hall_counts_simple_top, HallAlgebra, HallCache, PbwVector};
use crate::lambda::{LambdaSampler, SamplingConfig};
use crate::linalg::QMatrix;
use crate::oracle::{extension_middle_terms, hall_counts_brute, hom_dim_intertwiner};
use crate::quiver::{
    deg_leq, enumerate_multisegments, generic_ext_simple, hom_dim, peel_top, t_top, DimVector,
    Multisegment, QuiverSpec,
};
use crate::semican::SemicanEngine;

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    /// Bound on `|d|` for the exhaustive suites.
    pub dim_bound: usize,
    pub sampling: SamplingConfig,
    pub cache: Option<Arc<HallCache>>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            dim_bound: 6,
            sampling: SamplingConfig::default(),
            cache: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

const MAX_REPORTED: usize = 10;

struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn classes_up_to(n: usize, bound: usize) -> Vec<Multisegment> {
    let spec = QuiverSpec::new(n).expect("n >= 1");
    DimVector::all_up_to_total(n, bound)
        .iter()
        .flat_map(|d| enumerate_multisegments(spec, d).expect("dimension fits"))
        .collect()
}

fn run_suite(name: &str, f: impl FnOnce(&mut Tally) -> Result<()>) -> SuiteResult {
    let start = Instant::now();
    let mut t = Tally::new();
    if let Err(e) = f(&mut t) {
        t.failures.push(format!("error: {e}"));
    }
    let total = t.failures.len();
    t.failures.truncate(MAX_REPORTED);
    if total > MAX_REPORTED {
        t.failures.push(format!("... {} more", total - MAX_REPORTED));
    }
    SuiteResult {
        name: name.to_string(),
        passed: t.failures.is_empty(),
        checks: t.checks,
        failures: t.failures,
        elapsed: start.elapsed(),
    }
}

pub fn two_two(hall: &Arc<HallAlgebra>, sampling: &SamplingConfig) -> SuiteResult {
    run_suite("two-two", |t| {
        let spec = QuiverSpec::new(2)?;
        let engine = SemicanEngine::new(spec, hall.clone(), sampling.clone());
        let out = engine.transition_matrix(&DimVector::new(vec![2, 2]))?;
        let names: Vec<String> = out.transition.order.iter().map(|m| m.to_string()).collect();
        t.check(names == ["2[1,2]", "1[1,2]+1[1,1]+1[2,2]", "2[1,1]+2[2,2]"], || {
            format!("unexpected order {names:?}")
        });
        let expected = QMatrix::from_integers(&[vec![1, 1, 1], vec![0, 1, 2], vec![0, 0, 1]]);
        t.check(out.transition.matrix == expected, || {
            format!("transition matrix\n{}", out.transition.matrix)
        });
        t.check(out.certification.passed(), || format!("{:?}", out.certification));
        Ok(())
    })
}

pub fn serre(hall: &HallAlgebra, dim_bound: usize) -> SuiteResult {
    run_suite("serre", |t| {
        for n in 1..=4 {
            let r = hall.check_serre(QuiverSpec::new(n)?, dim_bound)?;
            t.checks += r.checks;
            t.failures.extend(r.failures);
        }
        Ok(())
    })
}

pub fn t_identities(sampling: &SamplingConfig, dim_bound: usize) -> SuiteResult {
    run_suite("t-identities", |t| {
        let sampler = LambdaSampler::new(sampling.clone());
        for n in 1..=3 {
            for m in classes_up_to(n, dim_bound) {
                let tn = sampler.t_component(&m, n)?;
                t.check(tn == t_top(&m, n), || format!("t_{n}(Z[{m}]) = {tn}"));
                for i in 1..n {
                    if t_top(&m, i + 1) != 0 {
                        continue;
                    }
                    let ti = sampler.t_component(&m, i)?;
                    t.check(ti == t_top(&m, i), || format!("t_{i}(Z[{m}]) = {ti}"));
                    if ti > 0 {
                        let peeled = sampler.peel_component(&m, i)?;
                        t.check(peeled == peel_top(&m, i), || {
                            format!("peel_{i}(Z[{m}]) = {peeled}")
                        });
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn hom_oracle(dim_bound: usize) -> SuiteResult {
    run_suite("hom-oracle", |t| {
        for n in 1..=3 {
            let classes = classes_up_to(n, dim_bound.min(5));
            for a in &classes {
                for b in &classes {
                    let (x, y) = (hom_dim(a, b), hom_dim_intertwiner(a, b));
                    t.check(x == y, || format!("hom({a}, {b}): {x} vs {y}"));
                }
            }
        }
        Ok(())
    })
}

pub fn hall_oracle(dim_bound: usize) -> SuiteResult {
    run_suite("hall-oracle", |t| {
        for n in 1..=3 {
            for l in classes_up_to(n, dim_bound.min(4)) {
                for i in 1..=n {
                    for a in 1..=t_top(&l, i) {
                        for p in [2, 3] {
                            let ok = hall_counts_simple_top(&l, i, a, p) == hall_counts_brute(&l, i, a, p);
                            t.check(ok, || format!("counts for {l}, i={i}, a={a}, p={p}"));
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn generic_extension(dim_bound: usize) -> SuiteResult {
    run_suite("generic-extension", |t| {
        for n in 1..=3 {
            for sub in classes_up_to(n, dim_bound.saturating_sub(1)) {
                for i in 1..=n {
                    for m in 1..=dim_bound - sub.total_dim() {
                        let g = generic_ext_simple(&sub, i, m);
                        let middles = extension_middle_terms(&sub, i, m, 2);
                        t.check(middles.contains(&g), || {
                            format!("{g} is not an extension of S_{i}^{m} by {sub}")
                        });
                        for l in &middles {
                            t.check(deg_leq(&g, l), || {
                                format!("generic extension {g} does not degenerate to {l}")
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn semisimple(hall: &Arc<HallAlgebra>, sampling: &SamplingConfig, dim_bound: usize) -> SuiteResult {
    run_suite("semisimple", |t| {
        for n in 1..=3 {
            let spec = QuiverSpec::new(n)?;
            let engine = SemicanEngine::new(spec, hall.clone(), sampling.clone());
            for d in DimVector::all_up_to_total(n, dim_bound) {
                let m = Multisegment::semisimple(spec, &d);
                let f = engine.semican_recursive(&m)?;
                t.check(f.pbw == PbwVector::basis(m.clone()), || format!("f[{m}] = {}", f.pbw));
            }
        }
        Ok(())
    })
}

pub fn hall_cache(cache: &HallCache) -> SuiteResult {
    run_suite("hall-cache", |t| {
        let v = cache.verify();
        t.checks += v.records_checked;
        t.failures.extend(v.problems);
        Ok(())
    })
}

/// Runs every suite. The cache suite runs first so that corrupted records
/// are reported before anything reads them.
pub fn run_all(config: &SelftestConfig) -> Vec<SuiteResult> {
    let hall = Arc::new(match &config.cache {
        Some(c) => HallAlgebra::with_cache(c.clone()),
        None => HallAlgebra::new(),
    });
    let b = config.dim_bound;
    let mut out = Vec::new();
    if let Some(c) = &config.cache {
        out.push(hall_cache(c));
    }
    out.push(two_two(&hall, &config.sampling));
    out.push(serre(&hall, b));
    out.push(t_identities(&config.sampling, b));
    out.push(hom_oracle(b));
    out.push(hall_oracle(b));
    out.push(generic_extension(b));
    out.push(semisimple(&hall, &config.sampling, b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bound_passes() {
        let results = run_all(&SelftestConfig {
            dim_bound: 3,
            ..SelftestConfig::default()
        });
        for r in &results {
            assert!(r.passed, "{}: {:?}", r.name, r.failures);
            assert!(r.checks > 0, "{}", r.name);
        }
    }
}
