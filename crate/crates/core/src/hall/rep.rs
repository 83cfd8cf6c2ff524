use crate::linalg::PrimeMatrix;
use crate::quiver::{DimVector, Multisegment, QuiverSpec, Segment};

/// A representation of the quiver over `F_p`: one matrix per arrow
/// `k -> k+1`, of shape `d_{k+1} x d_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMatrices {
    spec: QuiverSpec,
    p: u64,
    dims: DimVector,
    maps: Vec<PrimeMatrix>,
}

impl RepMatrices {
    pub fn new(spec: QuiverSpec, p: u64, dims: DimVector, maps: Vec<PrimeMatrix>) -> Self {
        assert_eq!(dims.len(), spec.n());
        assert_eq!(maps.len(), spec.n() - 1);
        for (k, m) in maps.iter().enumerate() {
            assert_eq!((m.rows(), m.cols()), (dims.as_slice()[k + 1], dims.as_slice()[k]));
        }
        Self { spec, p, dims, maps }
    }

    pub fn spec(&self) -> QuiverSpec {
        self.spec
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    /// Matrix of the arrow `k -> k+1` (1-based `k`).
    pub fn arrow(&self, k: usize) -> &PrimeMatrix {
        &self.maps[k - 1]
    }

    pub fn maps(&self) -> &[PrimeMatrix] {
        &self.maps
    }

    /// The composite `V_a -> V_b` for `a <= b`.
    pub fn composite(&self, a: usize, b: usize) -> PrimeMatrix {
        let mut m = PrimeMatrix::identity(self.p, self.dims.at(a));
        for k in a..b {
            m = self.arrow(k).mul(&m);
        }
        m
    }
}

/// Direct sum of interval modules with identity connecting maps. The basis
/// at each vertex lists the covering segments in canonical order.
pub fn realize(m: &Multisegment, p: u64) -> RepMatrices {
    let spec = m.spec();
    let n = spec.n();
    let segs: Vec<Segment> = m.segment_list();
    let dims = m.dim_vector();
    let index_at = |v: usize| -> Vec<usize> {
        segs.iter()
            .enumerate()
            .filter(|(_, s)| s.contains(v))
            .map(|(j, _)| j)
            .collect()
    };
    let mut maps = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let src = index_at(k);
        let dst = index_at(k + 1);
        let mut mat = PrimeMatrix::zeros(p, dst.len(), src.len());
        for (c, j) in src.iter().enumerate() {
            if let Some(r) = dst.iter().position(|x| x == j) {
                mat.set(r, c, 1);
            }
        }
        maps.push(mat);
    }
    RepMatrices::new(spec, p, dims, maps)
}

/// Recovers the multisegment from ranks of composites: the multiplicity of
/// `[a,b]` is `r(a,b) - r(a-1,b) - r(a,b+1) + r(a-1,b+1)`.
pub fn iso_class(x: &RepMatrices) -> Multisegment {
    let n = x.spec().n();
    let mut r = vec![vec![0usize; n + 2]; n + 2];
    for a in 1..=n {
        let mut m = PrimeMatrix::identity(x.p(), x.dims().at(a));
        r[a][a] = x.dims().at(a);
        for b in a + 1..=n {
            m = x.arrow(b - 1).mul(&m);
            r[a][b] = m.rank();
        }
    }
    let parts = (1..=n).flat_map(|a| (a..=n).map(move |b| (a, b))).map(|(a, b)| {
        let k = r[a][b] + r[a - 1][b + 1] - r[a - 1][b] - r[a][b + 1];
        (Segment { start: a, end: b }, k)
    });
    Multisegment::new(x.spec(), parts).expect("segments within range")
}
