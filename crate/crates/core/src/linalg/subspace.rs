/// Gaussian binomial `[m choose k]_q`, evaluated at an integer `q`.
pub fn gaussian_binomial(m: usize, k: usize, q: u64) -> u128 {
    if k > m {
        return 0;
    }
    // Pascal rule [m,k] = [m-1,k-1] + q^k [m-1,k].
    let q = q as u128;
    let mut row = vec![1u128];
    for mm in 1..=m {
        let mut next = vec![1u128; mm + 1];
        for kk in 1..mm {
            let shifted = q
                .checked_pow(kk as u32)
                .and_then(|qk| qk.checked_mul(row[kk]))
                .expect("gaussian binomial overflow");
            next[kk] = row[kk - 1].checked_add(shifted).expect("gaussian binomial overflow");
        }
        row = next;
    }
    row[k]
}

/// Iterator over the `k`-dimensional subspaces of the span of `ambient`
/// (linearly independent vectors over `F_p`). Each subspace is yielded once,
/// as a basis obtained from a reduced echelon coefficient matrix relative to
/// the ambient basis.
pub struct Subspaces {
    p: u64,
    ambient: Vec<Vec<u64>>,
    k: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: Vec<u64>,
    done: bool,
}

pub fn subspaces_ff(p: u64, ambient: &[Vec<u64>], k: usize) -> Subspaces {
    let m = ambient.len();
    let mut it = Subspaces {
        p,
        ambient: ambient.to_vec(),
        k,
        pivots: (0..k).collect(),
        free: Vec::new(),
        counter: Vec::new(),
        done: k > m,
    };
    if !it.done {
        it.reset_free();
    }
    it
}

impl Subspaces {
    fn dim(&self) -> usize {
        self.ambient.len()
    }

    fn reset_free(&mut self) {
        let m = self.dim();
        self.free = self
            .pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| {
                let pivots = &self.pivots;
                (c + 1..m).filter(move |j| !pivots.contains(j)).map(move |j| (r, j))
            })
            .collect();
        self.counter = vec![0; self.free.len()];
    }

    /// Next pivot combination in lexicographic order.
    fn advance_pivots(&mut self) -> bool {
        let m = self.dim();
        let k = self.k;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < m - k + i {
                self.pivots[i] += 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn advance_counter(&mut self) -> bool {
        for d in self.counter.iter_mut() {
            *d += 1;
            if *d < self.p {
                return true;
            }
            *d = 0;
        }
        false
    }

    fn current(&self) -> Vec<Vec<u64>> {
        let m = self.dim();
        let len = self.ambient.first().map_or(0, Vec::len);
        let mut coeffs = vec![vec![0u64; m]; self.k];
        for (r, &c) in self.pivots.iter().enumerate() {
            coeffs[r][c] = 1;
        }
        for (&(r, j), &v) in self.free.iter().zip(&self.counter) {
            coeffs[r][j] = v;
        }
        coeffs
            .iter()
            .map(|row| {
                let mut v = vec![0u64; len];
                for (c, &a) in row.iter().enumerate() {
                    if a != 0 {
                        for (x, y) in v.iter_mut().zip(&self.ambient[c]) {
                            *x = (*x + a * y) % self.p;
                        }
                    }
                }
                v
            })
            .collect()
    }
}

impl Iterator for Subspaces {
    type Item = Vec<Vec<u64>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.current();
        if !self.advance_counter() {
            if self.advance_pivots() {
                self.reset_free();
            } else {
                self.done = true;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PrimeMatrix;
    use std::collections::BTreeSet;

    fn standard(m: usize) -> Vec<Vec<u64>> {
        (0..m)
            .map(|i| (0..m).map(|j| u64::from(i == j)).collect())
            .collect()
    }

    #[test]
    fn small_counts() {
        assert_eq!(subspaces_ff(2, &standard(2), 1).count(), 3);
        assert_eq!(subspaces_ff(2, &standard(2), 2).count(), 1);
        assert_eq!(subspaces_ff(3, &standard(2), 1).count(), 4);
        assert_eq!(subspaces_ff(3, &standard(2), 0).count(), 1);
        assert_eq!(subspaces_ff(3, &standard(2), 3).count(), 0);
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_binomial(2, 1, 2), 3);
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(4, 2, 1), 6);
        assert_eq!(gaussian_binomial(3, 5, 2), 0);
    }

    /// Counts agree with Gaussian binomials, and the yielded subspaces are
    /// pairwise distinct.
    #[test]
    fn cardinalities_and_distinctness() {
        for p in [2u64, 3, 5] {
            for m in 0..=4 {
                for k in 0..=m {
                    let mut seen = BTreeSet::new();
                    let mut count = 0u128;
                    for basis in subspaces_ff(p, &standard(m), k) {
                        let rref = PrimeMatrix::from_vectors(p, m, &basis).rref();
                        assert_eq!(rref.pivots.len(), k);
                        seen.insert(rref.rows);
                        count += 1;
                    }
                    assert_eq!(count, gaussian_binomial(m, k, p), "p={p} m={m} k={k}");
                    assert_eq!(seen.len() as u128, count);
                }
            }
        }
    }

    #[test]
    fn works_inside_a_proper_span() {
        let amb = vec![vec![1, 1, 0], vec![0, 0, 1]];
        let subs: Vec<_> = subspaces_ff(3, &amb, 1).collect();
        assert_eq!(subs.len(), 4);
        for s in subs {
            // Every vector lies in the span {x0 = x1}.
            assert_eq!(s[0][0], s[0][1]);
        }
    }
}
