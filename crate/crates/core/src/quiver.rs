//! Representations of the linearly oriented quiver `1 -> 2 -> ... -> n`.
//!
//! Every representation is a direct sum of interval modules `[a,b]`, so an
//! isomorphism class is a [`Multisegment`]. The same label indexes the PBW
//! basis element `P_M` and the irreducible component `Z_M` of the nilpotent
//! variety.
//!
//! Conventions: the interval `[a,b]` has top `S_a` and socle `S_b`; its
//! submodules are `[c,b]` for `a <= c <= b`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuiverSpec {
    n: usize,
}

impl QuiverSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("quiver needs at least one vertex".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Cartan matrix entry `a_ij` of type `A_n`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        if i == j {
            2
        } else if i.abs_diff(j) == 1 {
            -1
        } else {
            0
        }
    }

    /// All intervals `[a,b]` in canonical order.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for a in 1..=self.n {
            for b in (a..=self.n).rev() {
                out.push(Segment { start: a, end: b });
            }
        }
        out
    }

    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::Dimension(format!("vertex {i} outside 1..={}", self.n)));
        }
        Ok(())
    }
}

/// Dimension vector `(dim V_1, ..., dim V_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DimVector(Vec<usize>);

impl DimVector {
    pub fn new(dims: Vec<usize>) -> Self {
        Self(dims)
    }

    pub fn zero(spec: QuiverSpec) -> Self {
        Self(vec![0; spec.n()])
    }

    pub fn for_spec(spec: QuiverSpec, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != spec.n() {
            return Err(Error::Dimension(format!(
                "dimension vector has {} entries, quiver has {} vertices",
                dims.len(),
                spec.n()
            )));
        }
        Ok(Self(dims))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based access.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn plus_simple(&self, i: usize, a: usize) -> Self {
        let mut d = self.0.clone();
        d[i - 1] += a;
        Self(d)
    }

    pub fn minus_simple(&self, i: usize, a: usize) -> Option<Self> {
        let mut d = self.0.clone();
        d[i - 1] = d[i - 1].checked_sub(a)?;
        Some(Self(d))
    }

    /// `sum_i d_i (d_i - 1) / 2`, the dimension of the product of full flag
    /// varieties.
    pub fn flag_degree_bound(&self) -> usize {
        self.0.iter().map(|&d| d * d.saturating_sub(1) / 2).sum()
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Every dimension vector of length `n` with total dimension at most
    /// `bound`.
    pub fn all_up_to_total(n: usize, bound: usize) -> Vec<Self> {
        fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<DimVector>) {
            if cur.len() == n {
                out.push(DimVector(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur.push(k);
                rec(n, left - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, bound, &mut Vec::new(), &mut out);
        out
    }

    /// Every dimension vector componentwise below `top`.
    pub fn all_below(top: &Self) -> Vec<Self> {
        let mut out = vec![Vec::new()];
        for &t in &top.0 {
            out = out
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    (0..=t).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(DimVector).collect()
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for DimVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad dimension entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(dims))
    }
}

/// The interval module `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || start > end {
            return Err(Error::Parse(format!("invalid segment [{start},{end}]")));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, v: usize) -> bool {
        self.start <= v && v <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_simple(&self) -> bool {
        self.start == self.end
    }
}

/// Start ascending, then longer segments first: `[1,2] < [1,1] < [2,2]`.
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.start
            .cmp(&other.start)
            .then_with(|| other.end.cmp(&self.end))
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// An isomorphism class of representations: a multiset of intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multisegment {
    n: usize,
    segs: BTreeMap<Segment, usize>,
}

impl Multisegment {
    pub fn zero(spec: QuiverSpec) -> Self {
        Self {
            n: spec.n(),
            segs: BTreeMap::new(),
        }
    }

    pub fn new(spec: QuiverSpec, parts: impl IntoIterator<Item = (Segment, usize)>) -> Result<Self> {
        let mut m = Self::zero(spec);
        for (s, k) in parts {
            if s.end > spec.n() {
                return Err(Error::Dimension(format!(
                    "segment {s} exceeds vertex count {}",
                    spec.n()
                )));
            }
            m.add(s, k);
        }
        Ok(m)
    }

    /// `S_i^a`.
    pub fn simple(spec: QuiverSpec, i: usize, a: usize) -> Self {
        let mut m = Self::zero(spec);
        m.add(Segment { start: i, end: i }, a);
        m
    }

    pub fn semisimple(spec: QuiverSpec, d: &DimVector) -> Self {
        let mut m = Self::zero(spec);
        for i in spec.vertices() {
            m.add(Segment { start: i, end: i }, d.at(i));
        }
        m
    }

    pub fn spec(&self) -> QuiverSpec {
        QuiverSpec { n: self.n }
    }

    fn add(&mut self, s: Segment, k: usize) {
        if k > 0 {
            *self.segs.entry(s).or_insert(0) += k;
        }
    }

    fn remove_one(&mut self, s: Segment) {
        let e = self.segs.get_mut(&s).expect("segment present");
        *e -= 1;
        if *e == 0 {
            self.segs.remove(&s);
        }
    }

    /// `(segment, multiplicity)` pairs in canonical order.
    pub fn segments(&self) -> impl Iterator<Item = (Segment, usize)> + '_ {
        self.segs.iter().map(|(s, k)| (*s, *k))
    }

    /// Segments with repetition, in canonical order.
    pub fn segment_list(&self) -> Vec<Segment> {
        self.segs
            .iter()
            .flat_map(|(s, k)| std::iter::repeat(*s).take(*k))
            .collect()
    }

    pub fn multiplicity(&self, s: Segment) -> usize {
        self.segs.get(&s).copied().unwrap_or(0)
    }

    pub fn dim_vector(&self) -> DimVector {
        let mut d = vec![0; self.n];
        for (s, k) in &self.segs {
            for v in s.start..=s.end {
                d[v - 1] += k;
            }
        }
        DimVector(d)
    }

    pub fn total_dim(&self) -> usize {
        self.segs.iter().map(|(s, k)| s.len() * k).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn is_semisimple(&self) -> bool {
        self.segs.keys().all(Segment::is_simple)
    }

    /// Parses the text form `m[a,b]+...`; the multiplicity prefix is
    /// optional and `0` denotes the zero module.
    pub fn parse(spec: QuiverSpec, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut m = Self::zero(spec);
        if s == "0" || s.is_empty() {
            return Ok(m);
        }
        for term in s.split('+') {
            let term = term.trim();
            let open = term
                .find('[')
                .ok_or_else(|| Error::Parse(format!("missing '[' in {term:?}")))?;
            let mult = if open == 0 {
                1
            } else {
                term[..open]
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad multiplicity in {term:?}: {e}")))?
            };
            let body = term[open..]
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("malformed segment {term:?}")))?;
            let (a, b) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("segment needs two ends: {term:?}")))?;
            let a = a
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad segment start in {term:?}: {e}")))?;
            let b = b
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad segment end in {term:?}: {e}")))?;
            let seg = Segment::new(a, b)?;
            if b > spec.n() {
                return Err(Error::Parse(format!("segment {seg} exceeds n = {}", spec.n())));
            }
            m.add(seg, mult);
        }
        Ok(m)
    }
}

impl fmt::Display for Multisegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.segs.iter().map(|(s, k)| format!("{k}{s}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// The letter `(i, a)`, standing for `1_{S_i^a}` (the divided power
/// `e_i^{(a)}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub vertex: usize,
    pub size: usize,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.vertex, self.size)
    }
}

/// A formal product of letters, leftmost letter on top: the word
/// `(i_1,a_1)...(i_k,a_k)` evaluated at `x` counts flags of submodules whose
/// top quotient is `S_{i_1}^{a_1}` and whose bottom piece is `S_{i_k}^{a_k}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self, spec: QuiverSpec) -> DimVector {
        let mut d = DimVector::zero(spec);
        for l in &self.0 {
            d.0[l.vertex - 1] += l.size;
        }
        d
    }

    /// `letter * self`.
    pub fn prepend(&self, letter: Letter) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Self(v)
    }

    /// The word with its last (bottom) letter removed.
    pub fn split_last(&self) -> Option<(Letter, Word)> {
        let (last, rest) = self.0.split_last()?;
        Some((*last, Word(rest.to_vec())))
    }

    pub fn parse(spec: QuiverSpec, s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body_end = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed letter in word {s:?}")))?;
            let body = rest[..body_end]
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("letter must start with '(' in {s:?}")))?;
            let (i, a) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("letter needs (i,a): {body:?}")))?;
            let vertex = i
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad vertex {i:?}: {e}")))?;
            let size = a
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad size {a:?}: {e}")))?;
            spec.check_vertex(vertex)
                .map_err(|_| Error::Parse(format!("vertex {vertex} outside 1..={}", spec.n())))?;
            if size == 0 {
                return Err(Error::Parse(format!("letter size must be positive in {s:?}")));
            }
            letters.push(Letter { vertex, size });
            rest = rest[body_end + 1..].trim_start();
        }
        Ok(Self(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All multisegments with dimension vector `d`, in canonical order.
pub fn enumerate_multisegments(spec: QuiverSpec, d: &DimVector) -> Result<Vec<Multisegment>> {
    if d.len() != spec.n() {
        return Err(Error::Dimension(format!(
            "dimension vector {d} has {} entries, expected {}",
            d.len(),
            spec.n()
        )));
    }
    let segs = spec.segments();
    let mut remaining = d.as_slice().to_vec();
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    enumerate_rec(spec, &segs, 0, &mut remaining, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate_rec(
    spec: QuiverSpec,
    segs: &[Segment],
    idx: usize,
    remaining: &mut [usize],
    chosen: &mut Vec<(Segment, usize)>,
    out: &mut Vec<Multisegment>,
) {
    if idx == segs.len() {
        if remaining.iter().all(|&r| r == 0) {
            out.push(Multisegment::new(spec, chosen.iter().copied()).expect("valid segments"));
        }
        return;
    }
    let s = segs[idx];
    // Every segment covering `s.start - 1` starts before `s.start`, so that
    // vertex must already be exhausted.
    if s.start > 1 && s.end == spec.n() && remaining[s.start - 2] != 0 {
        return;
    }
    let max = (s.start..=s.end).map(|v| remaining[v - 1]).min().unwrap_or(0);
    for k in (0..=max).rev() {
        for v in s.start..=s.end {
            remaining[v - 1] -= k;
        }
        if k > 0 {
            chosen.push((s, k));
        }
        enumerate_rec(spec, segs, idx + 1, remaining, chosen, out);
        if k > 0 {
            chosen.pop();
        }
        for v in s.start..=s.end {
            remaining[v - 1] += k;
        }
    }
}

/// `dim Hom([a,b], [c,d])`: one exactly when `c <= a <= d <= b`.
pub fn segment_hom(from: Segment, to: Segment) -> usize {
    usize::from(to.start <= from.start && from.start <= to.end && to.end <= from.end)
}

pub fn hom_dim(m: &Multisegment, n: &Multisegment) -> usize {
    m.segments()
        .flat_map(|(s, k)| n.segments().map(move |(t, l)| k * l * segment_hom(s, t)))
        .sum()
}

/// `<d, e> = sum_i d_i e_i - sum_{i<n} d_i e_{i+1}`.
pub fn euler_form(spec: QuiverSpec, d: &DimVector, e: &DimVector) -> i64 {
    let n = spec.n();
    let mut s: i64 = 0;
    for i in 1..=n {
        s += (d.at(i) * e.at(i)) as i64;
    }
    for i in 1..n {
        s -= (d.at(i) * e.at(i + 1)) as i64;
    }
    s
}

/// `dim Ext^1(M, N)`, from the Euler form (the path algebra is hereditary).
pub fn ext_dim(m: &Multisegment, n: &Multisegment) -> usize {
    let e = euler_form(m.spec(), &m.dim_vector(), &n.dim_vector());
    let h = hom_dim(m, n) as i64;
    (h - e) as usize
}

/// `M <=_deg N`, i.e. the orbit of `N` lies in the closure of the orbit of
/// `M`. Decided by `dim Hom(M, L) <= dim Hom(N, L)` for every interval `L`.
pub fn deg_leq(m: &Multisegment, n: &Multisegment) -> bool {
    if m.n != n.n || m.dim_vector() != n.dim_vector() {
        return false;
    }
    let probes = m.spec().segments();
    probes.iter().all(|&l| {
        let lm = Multisegment::new(m.spec(), [(l, 1)]).expect("valid interval");
        hom_dim(m, &lm) <= hom_dim(n, &lm)
    })
}

/// Topologically sorts `classes` along `<=_deg` (more generic classes
/// first), breaking ties by canonical order.
pub fn refine_order(classes: &[Multisegment]) -> Result<Vec<Multisegment>> {
    let k = classes.len();
    if let Some(first) = classes.first() {
        let d = first.dim_vector();
        if classes.iter().any(|c| c.dim_vector() != d) {
            return Err(Error::Dimension("classes do not share a dimension vector".into()));
        }
    }
    let mut indegree = vec![0usize; k];
    let mut succ = vec![Vec::new(); k];
    for a in 0..k {
        for b in 0..k {
            if a != b && deg_leq(&classes[a], &classes[b]) {
                succ[a].push(b);
                indegree[b] += 1;
            }
        }
    }
    let mut ready: BTreeSet<(Multisegment, usize)> = (0..k)
        .filter(|&a| indegree[a] == 0)
        .map(|a| (classes[a].clone(), a))
        .collect();
    let mut out = Vec::with_capacity(k);
    while let Some(entry) = ready.pop_first() {
        let a = entry.1;
        out.push(entry.0);
        for &b in &succ[a] {
            indegree[b] -= 1;
            if indegree[b] == 0 {
                ready.insert((classes[b].clone(), b));
            }
        }
    }
    if out.len() != k {
        return Err(Error::Internal("cycle in the degeneration order".into()));
    }
    Ok(out)
}

/// Number of segments starting at `i`; `t_{n+1} = 0`.
pub fn t_top(m: &Multisegment, i: usize) -> usize {
    m.segs
        .iter()
        .filter(|(s, _)| s.start == i)
        .map(|(_, k)| *k)
        .sum()
}

/// The unique submodule whose quotient is `S_i^{t_i(M)}`: every `[i,b]`
/// becomes `[i+1,b]`.
pub fn peel_top(m: &Multisegment, i: usize) -> Multisegment {
    let mut out = Multisegment { n: m.n, segs: BTreeMap::new() };
    for (s, k) in &m.segs {
        if s.start == i {
            if s.end > i {
                out.add(Segment { start: i + 1, end: s.end }, *k);
            }
        } else {
            out.add(*s, *k);
        }
    }
    out
}

/// The generic extension of `S_i^m` by `sub`: the longest segments starting
/// at `i+1` get the head `i`, and any leftover copies become `[i,i]`.
pub fn generic_ext_simple(sub: &Multisegment, i: usize, m: usize) -> Multisegment {
    let mut out = sub.clone();
    // Canonical order lists longer segments first within a start vertex.
    let candidates: Vec<Segment> = sub
        .segment_list()
        .into_iter()
        .filter(|s| s.start == i + 1)
        .take(m)
        .collect();
    for s in &candidates {
        out.remove_one(*s);
        out.add(Segment { start: i, end: s.end }, 1);
    }
    out.add(Segment { start: i, end: i }, m - candidates.len());
    out
}

/// Largest vertex `i` with `t_i(M) > 0` and `t_{i+1}(M) = 0`.
pub fn admissible_vertex(m: &Multisegment) -> Option<usize> {
    (1..=m.n)
        .rev()
        .find(|&i| t_top(m, i) > 0 && t_top(m, i + 1) == 0)
}

/// The word of the total generic flag obtained by scanning from `n`.
pub fn total_generic_flag(m: &Multisegment) -> Result<Word> {
    if m.is_zero() {
        return Err(Error::Dimension("the zero module has no generic flag".into()));
    }
    let mut letters = Vec::new();
    let mut cur = m.clone();
    while let Some(i) = admissible_vertex(&cur) {
        letters.push(Letter { vertex: i, size: t_top(&cur, i) });
        cur = peel_top(&cur, i);
    }
    debug_assert!(cur.is_zero());
    Ok(Word(letters))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> QuiverSpec {
        QuiverSpec::new(n).unwrap()
    }

    fn ms(n: usize, s: &str) -> Multisegment {
        Multisegment::parse(spec(n), s).unwrap()
    }

    #[test]
    fn enumerates_two_two_classes() {
        let classes = enumerate_multisegments(spec(2), &DimVector::new(vec![2, 2])).unwrap();
        let texts: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
        assert_eq!(texts.len(), 3);
        for t in ["2[1,1]+2[2,2]", "1[1,2]+1[1,1]+1[2,2]", "2[1,2]"] {
            assert!(texts.contains(&t.to_string()), "{t} missing from {texts:?}");
        }
    }

    #[test]
    fn single_vertex_has_one_class() {
        let classes = enumerate_multisegments(spec(1), &DimVector::new(vec![3])).unwrap();
        assert_eq!(classes, vec![ms(1, "3[1,1]")]);
    }

    /// Brute force: every multiset of at most |d| intervals, filtered by
    /// dimension vector.
    fn tilings_oracle(n: usize, d: &[usize]) -> BTreeSet<Multisegment> {
        let segs = spec(n).segments();
        let total: usize = d.iter().sum();
        let mut out = BTreeSet::new();
        let mut stack: Vec<(usize, Vec<Segment>)> = vec![(0, vec![])];
        while let Some((from, cur)) = stack.pop() {
            let m = Multisegment::new(spec(n), cur.iter().map(|s| (*s, 1))).unwrap();
            if m.dim_vector().as_slice() == d {
                out.insert(m);
            }
            if cur.len() < total {
                for (j, s) in segs.iter().enumerate().skip(from) {
                    let mut next = cur.clone();
                    next.push(*s);
                    stack.push((j, next));
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_tiling_oracle() {
        for (n, d) in [(3, vec![1, 1, 1]), (3, vec![2, 1, 2]), (2, vec![3, 2]), (4, vec![1, 2, 1, 1])] {
            let got: BTreeSet<_> = enumerate_multisegments(spec(n), &DimVector::new(d.clone()))
                .unwrap()
                .into_iter()
                .collect();
            assert_eq!(got, tilings_oracle(n, &d), "n={n} d={d:?}");
        }
        assert_eq!(tilings_oracle(3, &[1, 1, 1]).len(), 4);
    }

    #[test]
    fn dimension_length_mismatch_is_rejected() {
        assert!(enumerate_multisegments(spec(2), &DimVector::new(vec![1])).is_err());
    }

    #[test]
    fn zero_dimension_has_only_zero_module() {
        let classes = enumerate_multisegments(spec(3), &DimVector::zero(spec(3))).unwrap();
        assert_eq!(classes, vec![Multisegment::zero(spec(3))]);
    }

    #[test]
    fn hom_examples() {
        assert_eq!(hom_dim(&ms(2, "[1,2]"), &ms(2, "[1,1]")), 1);
        assert_eq!(hom_dim(&ms(2, "[1,1]"), &ms(2, "[1,2]")), 0);
        assert_eq!(hom_dim(&ms(2, "2[1,1]+2[2,2]"), &ms(2, "[1,1]")), 2);
    }

    #[test]
    fn euler_examples() {
        let s = spec(2);
        let d = |v: Vec<usize>| DimVector::new(v);
        assert_eq!(euler_form(s, &d(vec![1, 1]), &d(vec![1, 1])), 1);
        assert_eq!(euler_form(s, &d(vec![1, 0]), &d(vec![0, 1])), -1);
        assert_eq!(euler_form(s, &d(vec![2, 2]), &d(vec![2, 2])), 4);
    }

    #[test]
    fn degeneration_examples() {
        assert!(deg_leq(&ms(2, "2[1,2]"), &ms(2, "[1,2]+[1,1]+[2,2]")));
        assert!(!deg_leq(&ms(2, "2[1,1]+2[2,2]"), &ms(2, "2[1,2]")));
        let m = ms(3, "[1,2]+[2,3]");
        assert!(deg_leq(&m, &m));
        assert!(!deg_leq(&ms(2, "[1,2]"), &ms(2, "[1,1]")));
    }

    #[test]
    fn refine_order_examples() {
        let classes = enumerate_multisegments(spec(2), &DimVector::new(vec![2, 2])).unwrap();
        let order = refine_order(&classes).unwrap();
        let texts: Vec<String> = order.iter().map(|c| c.to_string()).collect();
        assert_eq!(texts, ["2[1,2]", "1[1,2]+1[1,1]+1[2,2]", "2[1,1]+2[2,2]"]);

        let single = vec![ms(2, "[1,2]")];
        assert_eq!(refine_order(&single).unwrap(), single);

        let classes = enumerate_multisegments(spec(3), &DimVector::new(vec![1, 1, 1])).unwrap();
        let order = refine_order(&classes).unwrap();
        assert_eq!(order.first().unwrap(), &ms(3, "[1,3]"));
        assert_eq!(order.last().unwrap(), &ms(3, "[1,1]+[2,2]+[3,3]"));
    }

    #[test]
    fn t_and_peel_examples() {
        let m = ms(2, "[1,2]+[1,1]");
        assert_eq!(t_top(&m, 1), 2);
        assert_eq!(t_top(&m, 2), 0);
        assert_eq!(t_top(&m, 3), 0);
        assert_eq!(t_top(&ms(2, "2[2,2]"), 2), 2);

        assert_eq!(peel_top(&ms(2, "2[1,2]"), 1), ms(2, "2[2,2]"));
        assert_eq!(peel_top(&ms(2, "[1,2]+[1,1]+[2,2]"), 2), ms(2, "[1,2]+[1,1]"));
        assert!(peel_top(&ms(2, "2[1,1]"), 1).is_zero());
        assert_eq!(peel_top(&m, 2), m);
    }

    #[test]
    fn generic_extension_examples() {
        assert_eq!(generic_ext_simple(&ms(2, "2[2,2]"), 1, 2), ms(2, "2[1,2]"));
        assert_eq!(generic_ext_simple(&ms(3, "[2,3]+[2,2]"), 1, 1), ms(3, "[1,3]+[2,2]"));
        assert_eq!(generic_ext_simple(&Multisegment::zero(spec(3)), 2, 3), ms(3, "3[2,2]"));
    }

    #[test]
    fn flag_words_match_worked_example() {
        let w = |s: &str| total_generic_flag(&ms(2, s)).unwrap().to_string();
        assert_eq!(w("2[1,1]+2[2,2]"), "(2,2)(1,2)");
        assert_eq!(w("[1,2]+[1,1]+[2,2]"), "(2,1)(1,2)(2,1)");
        assert_eq!(w("2[1,2]"), "(1,2)(2,2)");
        assert!(total_generic_flag(&Multisegment::zero(spec(2))).is_err());
    }

    #[test]
    fn peel_then_extend_roundtrips() {
        for d in DimVector::all_up_to_total(3, 6) {
            for m in enumerate_multisegments(spec(3), &d).unwrap() {
                for i in 1..=3 {
                    let t = t_top(&m, i);
                    if t > 0 && t_top(&m, i + 1) == 0 {
                        assert_eq!(generic_ext_simple(&peel_top(&m, i), i, t), m, "{m} at {i}");
                    }
                }
            }
        }
    }

    #[test]
    fn degeneration_is_a_partial_order() {
        for n in 1..=3 {
            for d in DimVector::all_up_to_total(n, 6) {
                let cs = enumerate_multisegments(spec(n), &d).unwrap();
                for a in &cs {
                    assert!(deg_leq(a, a));
                    for b in &cs {
                        if a != b && deg_leq(a, b) {
                            assert!(!deg_leq(b, a), "antisymmetry fails for {a}, {b}");
                        }
                        for c in &cs {
                            if deg_leq(a, b) && deg_leq(b, c) {
                                assert!(deg_leq(a, c), "transitivity fails for {a}, {b}, {c}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn different_dimension_vectors_are_incomparable() {
        assert!(!deg_leq(&ms(2, "[1,2]"), &ms(2, "[1,1]+[1,1]")));
    }

    #[test]
    fn text_formats() {
        let m = ms(2, "[1,1]+1[2,2]+[1,2]");
        assert_eq!(m.to_string(), "1[1,2]+1[1,1]+1[2,2]");
        assert_eq!(Multisegment::parse(spec(2), &m.to_string()).unwrap(), m);
        assert!(Multisegment::parse(spec(2), "[1,3]").is_err());
        assert!(Multisegment::parse(spec(2), "[2,1]").is_err());
        assert!(Multisegment::parse(spec(2), "x[1,1]").is_err());
        let w = Word::parse(spec(2), "(2,1)(1,2) (2,1)").unwrap();
        assert_eq!(w.to_string(), "(2,1)(1,2)(2,1)");
        assert_eq!(w.weight(spec(2)), DimVector::new(vec![2, 2]));
        assert!(Word::parse(spec(2), "(3,1)").is_err());
        assert!(Word::parse(spec(2), "(1,0)").is_err());
    }

    #[test]
    fn flag_letters_telescope() {
        for d in DimVector::all_up_to_total(3, 6) {
            for m in enumerate_multisegments(spec(3), &d).unwrap() {
                if m.is_zero() {
                    continue;
                }
                let w = total_generic_flag(&m).unwrap();
                assert!(w.letters().iter().all(|l| l.size >= 1));
                assert_eq!(w.weight(spec(3)), d);
            }
        }
    }
}
