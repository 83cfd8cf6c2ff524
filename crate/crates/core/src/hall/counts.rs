use std::collections::BTreeMap;

use super::rep::{iso_class, realize, RepMatrices};
use crate::linalg::{gaussian_binomial, PrimeMatrix, Rref};
use crate::quiver::{t_top, Multisegment};

/// The submodule of `x` obtained by replacing `V_i` with the subspace `w`,
/// which must contain the image of the arrow into `i`.
pub(crate) fn replace_vertex_space(x: &RepMatrices, i: usize, w: &Rref) -> RepMatrices {
    let p = x.p();
    let n = x.spec().n();
    let d = x.dims().at(i);
    let mut dims = x.dims().as_slice().to_vec();
    dims[i - 1] = w.dim();
    let mut maps: Vec<PrimeMatrix> = x.maps().to_vec();
    if i > 1 {
        maps[i - 2] = w.coordinates_of(x.arrow(i - 1));
    }
    if i < n {
        maps[i - 1] = x.arrow(i).mul(&w.basis_columns(p, d));
    }
    RepMatrices::new(x.spec(), p, crate::quiver::DimVector::new(dims), maps)
}

/// Counts, over `F_p`, the submodules `U` of `L` with `L / U = S_i^a`,
/// grouped by the isomorphism class of `U`.
///
/// Such `U` agree with `L` away from `i` and have `U_i = W` for a
/// codimension-`a` subspace `W` containing the incoming image `Im`. The class
/// of `U` depends only on `dim(W ∩ K_b)`, where `K_b` is the kernel of
/// `V_i -> V_b`. Passing to `V_i / Im`, the images of the `K_b` form a flag
/// and the count of each intersection pattern is a product of Gaussian
/// binomials: a Schubert-cell count. One representative per pattern is built
/// explicitly and classified with [`iso_class`].
pub fn hall_counts_simple_top(
    l: &Multisegment,
    i: usize,
    a: usize,
    p: u64,
) -> BTreeMap<Multisegment, u128> {
    let mut out = BTreeMap::new();
    let spec = l.spec();
    let n = spec.n();
    if a == 0 || i == 0 || i > n || a > t_top(l, i) {
        return out;
    }
    let x = realize(l, p);
    let d = x.dims().at(i);
    let image_vectors: Vec<Vec<u64>> = if i > 1 {
        let m = x.arrow(i - 1);
        (0..m.cols()).map(|c| m.column(c)).collect()
    } else {
        Vec::new()
    };
    let image = Rref::span(p, d, &image_vectors);
    let to_quotient = image.quotient_map(p, d);
    let lift_cols = image.complement_columns(d);
    let t = to_quotient.rows();
    debug_assert_eq!(t, t_top(l, i));

    // Adapted basis of V_i / Im along the flag of kernel images.
    let mut levels: Vec<Vec<Vec<u64>>> = Vec::new();
    for b in i + 1..=n {
        let kernel = x.composite(i, b).kernel();
        levels.push(kernel.iter().map(|v| to_quotient.apply(v)).collect());
    }
    levels.push(
        (0..t)
            .map(|j| (0..t).map(|c| u64::from(c == j)).collect())
            .collect(),
    );
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pieces: Vec<Vec<Vec<u64>>> = Vec::new();
    for gens in levels {
        let mut piece = Vec::new();
        for v in gens {
            let span = Rref::span(p, t, &basis);
            if !span.contains(p, &v) {
                basis.push(v.clone());
                piece.push(v);
            }
        }
        pieces.push(piece);
    }
    debug_assert_eq!(basis.len(), t);

    let target = t - a;
    let mut choice = vec![0usize; pieces.len()];
    for_each_profile(&pieces, target, 0, &mut choice, &mut |k: &[usize]| {
        let mut count: u128 = 1;
        let mut flag_dim = 0usize;
        let mut chosen_dim = 0usize;
        let mut w_vectors = image.rows.clone();
        for (piece, &kb) in pieces.iter().zip(k) {
            let g = piece.len();
            let cell = (p as u128)
                .checked_pow((kb * (flag_dim - chosen_dim)) as u32)
                .expect("hall count overflow");
            count = count
                .checked_mul(gaussian_binomial(g, kb, p))
                .and_then(|c| c.checked_mul(cell))
                .expect("hall count overflow");
            for wbar in &piece[..kb] {
                let mut v = vec![0u64; d];
                for (&col, &val) in lift_cols.iter().zip(wbar) {
                    v[col] = val;
                }
                w_vectors.push(v);
            }
            flag_dim += g;
            chosen_dim += kb;
        }
        let w = Rref::span(p, d, &w_vectors);
        let u = replace_vertex_space(&x, i, &w);
        *out.entry(iso_class(&u)).or_insert(0) += count;
    });
    out
}

fn for_each_profile(
    pieces: &[Vec<Vec<u64>>],
    left: usize,
    idx: usize,
    choice: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == pieces.len() {
        if left == 0 {
            f(choice);
        }
        return;
    }
    for k in 0..=pieces[idx].len().min(left) {
        choice[idx] = k;
        for_each_profile(pieces, left - k, idx + 1, choice, f);
    }
    choice[idx] = 0;
}
