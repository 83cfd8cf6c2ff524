use rand::Rng;

/// Dense matrix over the prime field `F_p`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Reduced row echelon form: nonzero rows and their pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
}

impl PrimeMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, k: usize) -> Self {
        let mut m = Self::zeros(p, k, k);
        for i in 0..k {
            m.set(i, i, 1);
        }
        m
    }

    pub fn new(p: u64, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(rows * cols, data.len(), "shape does not match data");
        let data = data.into_iter().map(|v| v % p).collect();
        Self { p, rows, cols, data }
    }

    /// Signed entries, reduced into `[0, p)`.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&v| v.rem_euclid(p as i64) as u64)
            })
            .collect();
        Self { p, rows: r, cols: c, data }
    }

    /// The matrix whose rows are `vectors` (each of length `cols`).
    pub fn from_vectors(p: u64, cols: usize, vectors: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(vectors.len() * cols);
        for v in vectors {
            assert_eq!(v.len(), cols);
            data.extend(v.iter().map(|x| x % p));
        }
        Self {
            p,
            rows: vectors.len(),
            cols,
            data,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed characteristics");
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let p = self.p;
        let mut out = Self::zeros(p, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = (out.data[idx] + a * other.get(k, c)) % p;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        Self { data, ..self.clone() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Self {
            p: self.p,
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            p: self.p,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (a, b)| (acc + a * b) % self.p)
            })
            .collect()
    }

    pub fn rref(&self) -> Rref {
        let p = self.p;
        let mut m: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            let Some(pr) = (lead..m.len()).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(lead, pr);
            let inv = inv_mod(m[lead][c], p);
            for v in m[lead].iter_mut() {
                *v = *v * inv % p;
            }
            let pivot_row = m[lead].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != lead && row[c] != 0 {
                    let f = row[c];
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x = (*x + p - f * y % p) % p;
                    }
                }
            }
            pivots.push(c);
            lead += 1;
            if lead == m.len() {
                break;
            }
        }
        m.truncate(lead);
        Rref { rows: m, pivots }
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let k = self.rows;
        if k == 0 {
            return Some(self.clone());
        }
        let Rref { rows, pivots } = self.hstack(&Self::identity(self.p, k)).rref();
        if pivots.len() < k || pivots[k - 1] >= k {
            return None;
        }
        let mut out = Self::zeros(self.p, k, k);
        for (r, row) in rows.iter().enumerate() {
            for c in 0..k {
                out.set(r, c, row[k + c]);
            }
        }
        Some(out)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{v : self * v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let Rref { rows, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0; self.cols];
                v[f] = 1;
                for (row, &pc) in rows.iter().zip(&pivots) {
                    v[pc] = (p - row[f]) % p;
                }
                v
            })
            .collect()
    }
}

impl Rref {
    /// Reduced echelon basis of the span of `vectors` in `F_p^dim`.
    pub fn span(p: u64, dim: usize, vectors: &[Vec<u64>]) -> Self {
        PrimeMatrix::from_vectors(p, dim, vectors).rref()
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Non-pivot coordinates; the matching unit vectors span a complement.
    pub fn complement_columns(&self, dim: usize) -> Vec<usize> {
        (0..dim).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The projection `F_p^dim -> F_p^dim / span`, in the coordinates of the
    /// complement columns. Its kernel is exactly the span.
    pub fn quotient_map(&self, p: u64, dim: usize) -> PrimeMatrix {
        let comp = self.complement_columns(dim);
        let mut m = PrimeMatrix::zeros(p, comp.len(), dim);
        for (j, &q) in comp.iter().enumerate() {
            m.set(j, q, 1);
            for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                m.set(j, pc, (p - row[q]) % p);
            }
        }
        m
    }

    /// The `dim x k` matrix whose columns are the basis vectors.
    pub fn basis_columns(&self, p: u64, dim: usize) -> PrimeMatrix {
        PrimeMatrix::from_vectors(p, dim, &self.rows).transpose()
    }

    /// Coordinates, relative to this basis, of the columns of `m` (which must
    /// lie in the span): simply the pivot rows.
    pub fn coordinates_of(&self, m: &PrimeMatrix) -> PrimeMatrix {
        m.select_rows(&self.pivots)
    }

    pub fn contains(&self, p: u64, v: &[u64]) -> bool {
        let mut vs = self.rows.clone();
        vs.push(v.to_vec());
        Rref::span(p, v.len(), &vs).dim() == self.dim()
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a % p, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn rank_ff(m: &PrimeMatrix) -> usize {
    m.rank()
}

/// A uniformly random solution of `a * x = b`, or `None` when the system is
/// inconsistent.
pub fn solve_affine_ff<R: Rng + ?Sized>(a: &PrimeMatrix, b: &[u64], rng: &mut R) -> Option<Vec<u64>> {
    assert_eq!(a.rows(), b.len(), "right-hand side has wrong length");
    let p = a.p();
    let n = a.cols();
    let col = PrimeMatrix::new(p, b.len(), 1, b.to_vec());
    let Rref { rows, pivots } = a.hstack(&col).rref();
    if pivots.last() == Some(&n) {
        return None;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut x = vec![0u64; n];
    for &f in &free {
        x[f] = rng.gen_range(0..p);
    }
    for (row, &pc) in rows.iter().zip(&pivots) {
        let mut v = row[n];
        for &f in &free {
            v = (v + p - row[f] * x[f] % p) % p;
        }
        x[pc] = v;
    }
    Some(x)
}
