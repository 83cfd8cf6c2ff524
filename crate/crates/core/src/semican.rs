//! The semicanonical basis in PBW coordinates.
//!
//! Two routes: inverting the evaluation matrix `E[K][N] = rho_{Z_K}(P_N)`,
//! and the recursion that peels a generic top `S_i^m` and subtracts the
//! components with larger `t_i`. Both are certified against each other and
//! against the delta property with freshly seeded samples.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hall::{HallAlgebra, PbwVector, PbwWordTable, WordCombo};
use crate::lambda::{derive_seed, LambdaSampler, SamplingConfig};
use crate::linalg::{invert_unitriangular, QMatrix, Rational};
use crate::quiver::{
    admissible_vertex, deg_leq, enumerate_multisegments, peel_top, refine_order, t_top, DimVector,
    Letter, Multisegment, QuiverSpec, Word,
};

/// `E[K][N] = rho_{Z_K}(P_N)`, rows and columns along `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationMatrix {
    pub dim: DimVector,
    pub order: Vec<Multisegment>,
    pub matrix: QMatrix,
}

/// `f_M = sum_N A[M][N] P_N`, rows and columns along `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    pub dim: DimVector,
    pub order: Vec<Multisegment>,
    pub matrix: QMatrix,
}

impl TransitionMatrix {
    /// Unit diagonal and `A[M][N] != 0 => M <=_deg N`.
    pub fn is_unitriangular(&self) -> bool {
        let k = self.order.len();
        (0..k).all(|r| {
            (0..k).all(|c| {
                let v = self.matrix.get(r, c);
                if r == c {
                    *v == Rational::from_integer(1.into())
                } else {
                    *v == Rational::from_integer(0.into()) || deg_leq(&self.order[r], &self.order[c])
                }
            })
        })
    }

    pub fn row(&self, m: &Multisegment) -> Option<PbwVector> {
        let r = self.order.iter().position(|x| x == m)?;
        let mut v = PbwVector::zero(self.dim.clone());
        for (c, n) in self.order.iter().enumerate() {
            v.add_term(n, self.matrix.get(r, c));
        }
        Some(v)
    }
}

/// A semicanonical basis element, in PBW coordinates and as a combination of
/// words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemicanElement {
    pub label: Multisegment,
    pub pbw: PbwVector,
    pub words: WordCombo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Certification {
    pub unitriangular: bool,
    pub routes_agree: bool,
    pub delta_identity: bool,
    /// Not required; recorded as an observation.
    pub integral: bool,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.unitriangular && self.routes_agree && self.delta_identity
    }
}

#[derive(Clone, Debug)]
pub struct CertifiedTransition {
    pub transition: TransitionMatrix,
    pub evaluation: EvaluationMatrix,
    pub recursive: QMatrix,
    pub delta: QMatrix,
    pub certification: Certification,
    pub construction_seed: u64,
    pub verification_seed: u64,
    pub prime_pool: Vec<u64>,
    pub samples_per_prime: usize,
    pub elapsed: Duration,
}

/// Seed of the independent sampler used for the delta check.
pub fn verification_seed(root: u64) -> u64 {
    derive_seed(root, "verify-delta")
}

pub struct SemicanEngine {
    spec: QuiverSpec,
    hall: Arc<HallAlgebra>,
    sampler: Arc<LambdaSampler>,
    elements: RwLock<HashMap<Multisegment, Arc<SemicanElement>>>,
    tables: RwLock<HashMap<DimVector, Arc<PbwWordTable>>>,
}

impl SemicanEngine {
    pub fn new(spec: QuiverSpec, hall: Arc<HallAlgebra>, config: SamplingConfig) -> Self {
        Self {
            spec,
            hall,
            sampler: Arc::new(LambdaSampler::new(config)),
            elements: RwLock::default(),
            tables: RwLock::default(),
        }
    }

    pub fn spec(&self) -> QuiverSpec {
        self.spec
    }

    pub fn hall(&self) -> &Arc<HallAlgebra> {
        &self.hall
    }

    pub fn sampler(&self) -> &Arc<LambdaSampler> {
        &self.sampler
    }

    fn check_dim(&self, d: &DimVector) -> Result<()> {
        if d.len() != self.spec.n() {
            return Err(Error::Dimension(format!(
                "dimension vector {d} has {} entries, expected {}",
                d.len(),
                self.spec.n()
            )));
        }
        Ok(())
    }

    pub fn order(&self, d: &DimVector) -> Result<Vec<Multisegment>> {
        self.check_dim(d)?;
        refine_order(&enumerate_multisegments(self.spec, d)?)
    }

    pub fn pbw_words(&self, d: &DimVector) -> Result<Arc<PbwWordTable>> {
        if let Some(t) = self.tables.read().expect("engine lock").get(d) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.hall.pbw_to_words(self.spec, d)?);
        self.tables.write().expect("engine lock").insert(d.clone(), t.clone());
        Ok(t)
    }

    fn evaluation_with(&self, sampler: &LambdaSampler, d: &DimVector, columns: &[WordCombo]) -> Result<QMatrix> {
        let order = self.order(d)?;
        let rows: Vec<Vec<Rational>> = order
            .par_iter()
            .map(|k| columns.iter().map(|c| sampler.rho_evaluate(k, c)).collect())
            .collect::<Result<_>>()?;
        QMatrix::from_rows(rows)
    }

    pub fn evaluation_matrix(&self, d: &DimVector) -> Result<EvaluationMatrix> {
        let order = self.order(d)?;
        let table = self.pbw_words(d)?;
        let columns: Vec<WordCombo> = order.iter().map(|n| table[n].clone()).collect();
        let matrix = self.evaluation_with(&self.sampler, d, &columns)?;
        Ok(EvaluationMatrix {
            dim: d.clone(),
            order,
            matrix,
        })
    }

    /// `A = (E^T)^{-1}`, so that `rho_{Z_K}(f_M) = delta_{KM}`.
    pub fn transition_via_inversion(&self, d: &DimVector) -> Result<(TransitionMatrix, EvaluationMatrix)> {
        let e = self.evaluation_matrix(d)?;
        let et = e.matrix.transpose();
        if !et.is_upper_unitriangular() {
            return Err(Error::NotUnitriangular(format!(
                "evaluation matrix for {d} is not lower unitriangular along the degeneration order:\n{}",
                e.matrix
            )));
        }
        let a = TransitionMatrix {
            dim: d.clone(),
            order: e.order.clone(),
            matrix: invert_unitriangular(&et)?,
        };
        if !a.matrix.mul(&et)?.is_identity() {
            return Err(Error::Internal("A E^T is not the identity".into()));
        }
        if !a.is_unitriangular() {
            return Err(Error::NotUnitriangular(format!(
                "transition matrix for {d} has support outside the degeneration order:\n{}",
                a.matrix
            )));
        }
        Ok((a, e))
    }

    fn base_word(m: &Multisegment) -> Word {
        let d = m.dim_vector();
        Word::new(
            (1..=m.spec().n())
                .rev()
                .filter(|&i| d.at(i) > 0)
                .map(|i| Letter { vertex: i, size: d.at(i) })
                .collect(),
        )
    }

    fn remember(&self, e: SemicanElement) -> Arc<SemicanElement> {
        let e = Arc::new(e);
        self.elements
            .write()
            .expect("engine lock")
            .entry(e.label.clone())
            .or_insert(e)
            .clone()
    }

    fn memo(&self, m: &Multisegment) -> Option<Arc<SemicanElement>> {
        self.elements.read().expect("engine lock").get(m).cloned()
    }

    /// `f_M` by the peeling recursion, scanning vertices from `n`.
    pub fn semican_recursive(&self, m: &Multisegment) -> Result<Arc<SemicanElement>> {
        if let Some(e) = self.memo(m) {
            return Ok(e);
        }
        if m.is_semisimple() {
            let w = Self::base_word(m);
            let pbw = (*self.hall.monomial(self.spec, &w)?).clone();
            return Ok(self.remember(SemicanElement {
                label: m.clone(),
                pbw,
                words: WordCombo::word(self.spec, w),
            }));
        }
        let i = admissible_vertex(m).ok_or_else(|| Error::Internal(format!("no admissible vertex for {m}")))?;
        self.semican_component(m, i)
    }

    /// Generic `t_i` on `Z_L`, read off `L` when `i = n` or `t_{i+1}(L) = 0`.
    fn t_fast(&self, l: &Multisegment, i: usize) -> Result<usize> {
        if i == self.spec.n() || t_top(l, i + 1) == 0 {
            Ok(t_top(l, i))
        } else {
            self.sampler.t_component(l, i)
        }
    }

    fn peel_fast(&self, l: &Multisegment, i: usize) -> Result<Multisegment> {
        if i == self.spec.n() || t_top(l, i + 1) == 0 {
            Ok(peel_top(l, i))
        } else {
            self.sampler.peel_component(l, i)
        }
    }

    /// `f_L` computed by peeling at the fixed vertex `i`:
    /// `f_L = 1_{S_i^m} * f_{L'} - sum_{t_i(Z_K) > m} rho_{Z_K}(1_{S_i^m} * f_{L'}) f_K`.
    pub fn semican_component(&self, l: &Multisegment, i: usize) -> Result<Arc<SemicanElement>> {
        if let Some(e) = self.memo(l) {
            return Ok(e);
        }
        let m = self.t_fast(l, i)?;
        if m == 0 {
            return self.semican_recursive(l);
        }
        let sub = self.peel_fast(l, i)?;
        let f_sub = self.semican_recursive(&sub)?;
        let letter = Letter { vertex: i, size: m };
        let mut pbw = self.hall.left_mul_divided_power(i, m, &f_sub.pbw)?;
        let mut words = f_sub.words.left_mul_letter(letter);
        let g_words = words.clone();
        for k in enumerate_multisegments(self.spec, &l.dim_vector())? {
            if k == *l || self.t_fast(&k, i)? <= m {
                continue;
            }
            let c = self.sampler.rho_evaluate(&k, &g_words)?;
            if c == Rational::from_integer(0.into()) {
                continue;
            }
            let f_k = self.semican_component(&k, i)?;
            pbw.add_scaled(&f_k.pbw, &-c.clone())?;
            words.add_scaled(&f_k.words, &-c)?;
        }
        Ok(self.remember(SemicanElement {
            label: l.clone(),
            pbw,
            words,
        }))
    }

    /// `rho_{Z_K}(f_M)` for all `K, M`, evaluated with an independently
    /// seeded sampler.
    pub fn verify_delta(&self, a: &TransitionMatrix, seed: u64) -> Result<QMatrix> {
        let d = &a.dim;
        let table = self.pbw_words(d)?;
        let fresh = LambdaSampler::new(self.sampler.config().with_seed(seed));
        let k = a.order.len();
        let mut columns = Vec::with_capacity(k);
        for r in 0..k {
            let mut combo = WordCombo::zero(d.clone());
            for (c, n) in a.order.iter().enumerate() {
                combo.add_scaled(&table[n], a.matrix.get(r, c))?;
            }
            columns.push(combo);
        }
        self.evaluation_with(&fresh, d, &columns)
    }

    /// Both routes, the delta check and the unitriangularity check.
    pub fn transition_matrix(&self, d: &DimVector) -> Result<CertifiedTransition> {
        let start = Instant::now();
        let (a, e) = self.transition_via_inversion(d)?;
        let mut rows = Vec::with_capacity(a.order.len());
        for m in &a.order {
            rows.push(self.semican_recursive(m)?.pbw.to_dense(&a.order));
        }
        let recursive = QMatrix::from_rows(rows)?;
        let routes_agree = recursive == a.matrix;
        let vseed = verification_seed(self.sampler.config().root_seed);
        let delta = self.verify_delta(&a, vseed)?;
        let certification = Certification {
            unitriangular: a.is_unitriangular(),
            routes_agree,
            delta_identity: delta.is_identity(),
            integral: a.matrix.is_integral(),
        };
        let config = self.sampler.config();
        Ok(CertifiedTransition {
            prime_pool: config.prime_pool(d),
            samples_per_prime: config.samples_per_prime,
            construction_seed: config.root_seed,
            verification_seed: vseed,
            transition: a,
            evaluation: e,
            recursive,
            delta,
            certification,
            elapsed: start.elapsed(),
        })
    }

    /// Like [`SemicanEngine::transition_matrix`], failing unless every
    /// certification check passes.
    pub fn certified_transition(&self, d: &DimVector) -> Result<CertifiedTransition> {
        let out = self.transition_matrix(d)?;
        if !out.certification.routes_agree {
            return Err(Error::RouteDisagreement {
                dim: d.to_string(),
                detail: format!(
                    "inversion route:\n{}\nrecursive route:\n{}",
                    out.transition.matrix, out.recursive
                ),
            });
        }
        if !out.certification.delta_identity {
            return Err(Error::RouteDisagreement {
                dim: d.to_string(),
                detail: format!("delta check with fresh seeds is not the identity:\n{}", out.delta),
            });
        }
        if !out.certification.unitriangular {
            return Err(Error::NotUnitriangular(out.transition.matrix.to_string()));
        }
        Ok(out)
    }
}
