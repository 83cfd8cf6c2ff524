//! Serializable transition reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{parse_rational, rational_to_string, QMatrix};
use crate::semican::CertifiedTransition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub unitriangular: bool,
    pub routes_agree: bool,
    pub delta_identity: bool,
    pub integral: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedReport {
    pub construction: u64,
    pub verification: u64,
}

/// Everything a transition run produces, with exact entries as `"p/q"`
/// strings. Rows and columns follow `order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub n: usize,
    pub dim: Vec<usize>,
    pub order: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub evaluation_matrix: Vec<Vec<String>>,
    pub recursive_matrix: Vec<Vec<String>>,
    pub delta_matrix: Vec<Vec<String>>,
    pub certification: CertificationReport,
    pub seeds: SeedReport,
    pub prime_pool: Vec<u64>,
    pub samples_per_prime: usize,
}

fn rows_of(m: &QMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(rational_to_string).collect())
        .collect()
}

fn parse_rows(rows: &[Vec<String>]) -> Result<QMatrix> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(parsed)
}

impl TransitionReport {
    pub fn from_certified(c: &CertifiedTransition) -> Self {
        let t = &c.transition;
        Self {
            n: t.dim.len(),
            dim: t.dim.as_slice().to_vec(),
            order: t.order.iter().map(|m| m.to_string()).collect(),
            matrix: rows_of(&t.matrix),
            evaluation_matrix: rows_of(&c.evaluation.matrix),
            recursive_matrix: rows_of(&c.recursive),
            delta_matrix: rows_of(&c.delta),
            certification: CertificationReport {
                unitriangular: c.certification.unitriangular,
                routes_agree: c.certification.routes_agree,
                delta_identity: c.certification.delta_identity,
                integral: c.certification.integral,
                passed: c.certification.passed(),
            },
            seeds: SeedReport {
                construction: c.construction_seed,
                verification: c.verification_seed,
            },
            prime_pool: c.prime_pool.clone(),
            samples_per_prime: c.samples_per_prime,
        }
    }

    pub fn transition(&self) -> Result<QMatrix> {
        parse_rows(&self.matrix)
    }

    pub fn evaluation(&self) -> Result<QMatrix> {
        parse_rows(&self.evaluation_matrix)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("transition report: {e}")))
    }

    /// The transition matrix only, one row per class.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("class").chain(self.order.iter().map(String::as_str));
        w.write_record(header).expect("in-memory write");
        for (name, row) in self.order.iter().zip(&self.matrix) {
            let record = std::iter::once(name.as_str()).chain(row.iter().map(String::as_str));
            w.write_record(record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_pretty(&self) -> String {
        let dim: Vec<String> = self.dim.iter().map(|d| d.to_string()).collect();
        let mut out = format!("n = {}, dimension vector ({})\n", self.n, dim.join(","));
        let width = self.order.iter().map(String::len).max().unwrap_or(0);
        let cell = self
            .matrix
            .iter()
            .flatten()
            .map(|v| v.strip_suffix("/1").unwrap_or(v).len())
            .max()
            .unwrap_or(1);
        out.push_str("order:\n");
        for (k, c) in self.order.iter().enumerate() {
            out.push_str(&format!("  {k:>2}  {c}\n"));
        }
        out.push_str("f_M = sum_N A[M][N] P_N:\n");
        for (name, row) in self.order.iter().zip(&self.matrix) {
            let cells: Vec<String> = row
                .iter()
                .map(|v| format!("{:>cell$}", v.strip_suffix("/1").unwrap_or(v)))
                .collect();
            out.push_str(&format!("  {name:<width$}  [ {} ]\n", cells.join(" ")));
        }
        let c = &self.certification;
        let mark = |b: bool| if b { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "unitriangular: {}\nroutes agree: {}\ndelta check: {}\nintegral entries: {}\ncertification: {}\n",
            mark(c.unitriangular),
            mark(c.routes_agree),
            mark(c.delta_identity),
            if c.integral { "yes" } else { "no" },
            mark(c.passed)
        ));
        out.push_str(&format!(
            "seeds: construction {}, verification {}\nprimes: {:?}, {} samples per prime\n",
            self.seeds.construction, self.seeds.verification, self.prime_pool, self.samples_per_prime
        ));
        out
    }
}
