//! Slow, direct computations used to cross-check the combinatorial
//! shortcuts.

use std::collections::BTreeMap;

use crate::hall::{iso_class, realize, replace_vertex_space, RepMatrices};
use crate::linalg::{subspaces_ff, PrimeMatrix, Rref};
use crate::quiver::{enumerate_multisegments, Multisegment};

/// Prime used for the linear-algebra oracles.
pub const ORACLE_PRIME: u64 = 101;

/// The map `(phi_v) -> (x'_k phi_k - phi_{k+1} x_k)` whose kernel is
/// `Hom(M, N)` and whose cokernel is `Ext^1(M, N)`.
fn intertwiner_system(x: &RepMatrices, y: &RepMatrices) -> PrimeMatrix {
    let p = x.p();
    let n = x.spec().n();
    let d = |k: usize| x.dims().at(k);
    let e = |k: usize| y.dims().at(k);
    // phi_v is e_v x d_v, row-major.
    let mut offsets = vec![0usize; n + 1];
    for v in 1..=n {
        offsets[v] = offsets[v - 1] + e(v) * d(v);
    }
    let rows: usize = (1..n).map(|k| e(k + 1) * d(k)).sum();
    let mut a = PrimeMatrix::zeros(p, rows, offsets[n]);
    let mut row = 0;
    for k in 1..n {
        let (xk, yk) = (x.arrow(k), y.arrow(k));
        for r in 0..e(k + 1) {
            for c in 0..d(k) {
                // (y_k phi_k)[r][c] = sum_j y_k[r][j] phi_k[j][c]
                for j in 0..e(k) {
                    let col = offsets[k - 1] + j * d(k) + c;
                    a.set(row, col, (a.get(row, col) + yk.get(r, j)) % p);
                }
                // (phi_{k+1} x_k)[r][c] = sum_j phi_{k+1}[r][j] x_k[j][c]
                for j in 0..d(k + 1) {
                    let col = offsets[k] + r * d(k + 1) + j;
                    a.set(row, col, (a.get(row, col) + p - xk.get(j, c)) % p);
                }
                row += 1;
            }
        }
    }
    a
}

/// `dim Hom(M, N)` as the solution space of the intertwining equations.
pub fn hom_dim_intertwiner(m: &Multisegment, n: &Multisegment) -> usize {
    let a = intertwiner_system(&realize(m, ORACLE_PRIME), &realize(n, ORACLE_PRIME));
    a.cols() - a.rank()
}

/// `dim Ext^1(M, N)` as the cokernel of the intertwining map.
pub fn ext_dim_cokernel(m: &Multisegment, n: &Multisegment) -> usize {
    let a = intertwiner_system(&realize(m, ORACLE_PRIME), &realize(n, ORACLE_PRIME));
    a.rows() - a.rank()
}

/// Submodules of `L` with quotient `S_i^a`, by enumerating every
/// codimension-`a` subspace of `V_i` and keeping those that contain the
/// incoming image.
pub fn hall_counts_brute(l: &Multisegment, i: usize, a: usize, p: u64) -> BTreeMap<Multisegment, u128> {
    let mut out = BTreeMap::new();
    let x = realize(l, p);
    let d = x.dims().at(i);
    if a == 0 || a > d {
        return out;
    }
    let image: Vec<Vec<u64>> = if i > 1 {
        let m = x.arrow(i - 1);
        (0..m.cols()).map(|c| m.column(c)).collect()
    } else {
        Vec::new()
    };
    let standard: Vec<Vec<u64>> = (0..d)
        .map(|r| (0..d).map(|c| u64::from(r == c)).collect())
        .collect();
    for basis in subspaces_ff(p, &standard, d - a) {
        let w = Rref::span(p, d, &basis);
        if image.iter().all(|v| w.contains(p, v)) {
            *out.entry(iso_class(&replace_vertex_space(&x, i, &w))).or_insert(0) += 1;
        }
    }
    out
}

/// Every middle term `L` of an exact sequence `0 -> sub -> L -> S_i^m -> 0`,
/// found by scanning all classes of the right dimension over `F_p`.
pub fn extension_middle_terms(sub: &Multisegment, i: usize, m: usize, p: u64) -> Vec<Multisegment> {
    let d = sub.dim_vector().plus_simple(i, m);
    enumerate_multisegments(sub.spec(), &d)
        .expect("dimension vector fits")
        .into_iter()
        .filter(|l| {
            crate::hall::hall_counts_simple_top(l, i, m, p)
                .get(sub)
                .is_some_and(|&c| c > 0)
        })
        .collect()
}
