//! Lattice points of dilated polytopes and the additive set operations on them.
//!
//! All sumset and difference-set work goes through [`AdditiveKernel`]: points
//! of a base set are embedded in a dense mixed-radix grid whose extents are
//! `2·ext - 1` per coordinate, so that
//!
//! * `offset(a) + offset(b)` is the grid index of `a + b` (shifted by `2·lo`), and
//! * `offset(a) - offset(b) + center` is the grid index of `a - b`.
//!
//! A sumset is then the OR of copies of the subset bitmap shifted by each
//! present offset, and a difference set the OR of copies shifted by
//! `center - offset(b)`. Both shifts are non-negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::point::Point;

/// Default cap on candidate points scanned by [`enumerate_lattice`].
pub const DEFAULT_SCAN_CAP: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl BBox {
    fn of(points: &[Point]) -> Option<BBox> {
        let first = points.first()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for p in &points[1..] {
            for (k, &c) in p.0.iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        Some(BBox { lo, hi })
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.0.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (l, h))| l <= c && c <= h)
    }
}

/// Finite set of lattice points, sorted lexicographically and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSet {
    dim: usize,
    points: Vec<Point>,
    #[serde(skip)]
    bbox: Option<BBox>,
}

impl LatticeSet {
    pub fn from_points(dim: usize, points: impl IntoIterator<Item = Point>) -> Self {
        let mut points: Vec<Point> = points.into_iter().collect();
        assert!(points.iter().all(|p| p.dim() == dim), "point dimension mismatch");
        points.sort();
        points.dedup();
        let bbox = BBox::of(&points);
        LatticeSet { dim, points, bbox }
    }

    /// Convenience for one-dimensional sets.
    pub fn from_ints(values: impl IntoIterator<Item = i64>) -> Self {
        Self::from_points(1, values.into_iter().map(|v| Point(vec![v])))
    }

    pub fn empty(dim: usize) -> Self {
        LatticeSet { dim, points: Vec::new(), bbox: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bbox(&self) -> Option<&BBox> {
        self.bbox.as_ref()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn is_subset(&self, other: &LatticeSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &LatticeSet) -> LatticeSet {
        LatticeSet::from_points(
            self.dim,
            self.points.iter().filter(|p| !other.contains(p)).cloned(),
        )
    }

    /// Subset selected by `mask` (bit `i` = presence of `points[i]`).
    pub fn select(&self, mask: &SubsetMask<'_>) -> LatticeSet {
        LatticeSet::from_points(self.dim, mask.indices().map(|i| self.points[i].clone()))
    }
}

impl<'a> IntoIterator for &'a LatticeSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Subset of a base [`LatticeSet`] as a bit vector over its indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetMask<'a> {
    base: &'a LatticeSet,
    bits: Vec<u64>,
}

impl<'a> SubsetMask<'a> {
    pub fn empty(base: &'a LatticeSet) -> Self {
        SubsetMask { base, bits: vec![0; base.len().div_ceil(64)] }
    }

    pub fn full(base: &'a LatticeSet) -> Self {
        let mut m = Self::empty(base);
        for i in 0..base.len() {
            m.set(i, true);
        }
        m
    }

    /// Mask of the points of `subset`; every point must lie in `base`.
    pub fn from_subset(base: &'a LatticeSet, subset: &LatticeSet) -> Result<Self> {
        let mut m = Self::empty(base);
        for p in subset {
            let i = base
                .index_of(p)
                .ok_or_else(|| Error::InvalidInput(format!("point {p} is not in the base set")))?;
            m.set(i, true);
        }
        Ok(m)
    }

    pub fn from_words(base: &'a LatticeSet, mut bits: Vec<u64>) -> Self {
        bits.resize(base.len().div_ceil(64), 0);
        if !base.len().is_multiple_of(64) {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << (base.len() % 64)) - 1;
            }
        }
        SubsetMask { base, bits }
    }

    pub fn base(&self) -> &'a LatticeSet {
        self.base
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        assert!(i < self.base.len(), "index {i} out of range");
        if on {
            self.bits[i / 64] |= 1 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        BitIter::new(&self.bits)
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }
}

/// Iterator over the set bit positions of a word slice.
pub(crate) struct BitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        BitIter { words, idx: 0, cur: words.first().copied().unwrap_or(0) }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + b);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// `out |= src << shift`, with `src` truncated to its first `src_words` words.
fn or_shifted(out: &mut [u64], src: &[u64], src_words: usize, shift: usize) {
    let ws = shift / 64;
    let bs = (shift % 64) as u32;
    let src = &src[..src_words.min(src.len())];
    if bs == 0 {
        for (i, &w) in src.iter().enumerate() {
            if let Some(o) = out.get_mut(i + ws) {
                *o |= w;
            }
        }
    } else {
        for (i, &w) in src.iter().enumerate() {
            if w == 0 {
                continue;
            }
            if let Some(o) = out.get_mut(i + ws) {
                *o |= w << bs;
            }
            if let Some(o) = out.get_mut(i + ws + 1) {
                *o |= w >> (64 - bs);
            }
        }
    }
}

pub(crate) fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Dense grid over the sum/difference region of a base set, with the
/// precomputed potential sumset and difference set of the whole base.
#[derive(Clone, Debug)]
pub struct AdditiveKernel {
    dim: usize,
    lo: Vec<i64>,
    ext: Vec<i64>,
    strides: Vec<usize>,
    center: usize,
    words: usize,
    src_words: usize,
    offsets: Vec<usize>,
    potential_sums: Vec<u64>,
    potential_diffs: Vec<u64>,
    potential_sum_count: usize,
    potential_diff_count: usize,
}

/// Per-worker buffers for [`AdditiveKernel`]. Allocated once, reused per call.
#[derive(Clone, Debug)]
pub struct KernelScratch {
    src: Vec<u64>,
    pub(crate) sums: Vec<u64>,
    pub(crate) diffs: Vec<u64>,
    present: Vec<usize>,
}

impl KernelScratch {
    /// Grid bitmap of the last computed sumset.
    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    /// Grid bitmap of the last computed difference set.
    pub fn diffs(&self) -> &[u64] {
        &self.diffs
    }
}

/// Sizes and missing counts for one subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetCounts {
    pub size: usize,
    pub sums: usize,
    pub diffs: usize,
    pub missing_sums: usize,
    pub missing_diffs: usize,
}

impl AdditiveKernel {
    pub fn new(base: &LatticeSet) -> Self {
        let dim = base.dim();
        let (lo, ext) = match base.bbox() {
            Some(b) => (
                b.lo.clone(),
                b.lo.iter().zip(&b.hi).map(|(l, h)| h - l + 1).collect::<Vec<_>>(),
            ),
            None => (vec![0; dim], vec![1; dim]),
        };
        let mut strides = vec![1usize; dim];
        for k in (0..dim.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (2 * ext[k + 1] as usize - 1);
        }
        let total: usize = ext.iter().map(|&e| 2 * e as usize - 1).product();
        let center: usize = (0..dim).map(|k| (ext[k] as usize - 1) * strides[k]).sum();
        let words = total.div_ceil(64).max(1);
        let src_words = center / 64 + 1;
        let offsets: Vec<usize> = base
            .points()
            .iter()
            .map(|p| (0..dim).map(|k| (p.0[k] - lo[k]) as usize * strides[k]).sum())
            .collect();
        let mut kernel = AdditiveKernel {
            dim,
            lo,
            ext,
            strides,
            center,
            words,
            src_words,
            offsets,
            potential_sums: Vec::new(),
            potential_diffs: Vec::new(),
            potential_sum_count: 0,
            potential_diff_count: 0,
        };
        let mut scratch = kernel.scratch();
        let all: Vec<usize> = (0..base.len()).collect();
        kernel.compute(&all, &mut scratch);
        kernel.potential_sum_count = popcount(&scratch.sums);
        kernel.potential_diff_count = popcount(&scratch.diffs);
        kernel.potential_sums = scratch.sums;
        kernel.potential_diffs = scratch.diffs;
        kernel
    }

    pub fn scratch(&self) -> KernelScratch {
        KernelScratch {
            src: vec![0; self.words],
            sums: vec![0; self.words],
            diffs: vec![0; self.words],
            present: Vec::new(),
        }
    }

    pub fn base_len(&self) -> usize {
        self.offsets.len()
    }

    pub fn potential_sum_count(&self) -> usize {
        self.potential_sum_count
    }

    pub fn potential_diff_count(&self) -> usize {
        self.potential_diff_count
    }

    /// Fills `scratch.sums` / `scratch.diffs` with A+A and A-A for the subset
    /// given by base indices.
    pub fn compute(&self, present: &[usize], scratch: &mut KernelScratch) {
        self.compute_sums(present, scratch);
        self.compute_diffs(present, scratch);
    }

    fn load(&self, present: &[usize], scratch: &mut KernelScratch) {
        scratch.src.iter_mut().for_each(|w| *w = 0);
        for &i in present {
            let o = self.offsets[i];
            scratch.src[o / 64] |= 1 << (o % 64);
        }
    }

    pub fn compute_sums(&self, present: &[usize], scratch: &mut KernelScratch) {
        self.load(present, scratch);
        scratch.sums.iter_mut().for_each(|w| *w = 0);
        for &i in present {
            or_shifted(&mut scratch.sums, &scratch.src, self.src_words, self.offsets[i]);
        }
    }

    pub fn compute_diffs(&self, present: &[usize], scratch: &mut KernelScratch) {
        self.load(present, scratch);
        scratch.diffs.iter_mut().for_each(|w| *w = 0);
        for &i in present {
            or_shifted(&mut scratch.diffs, &scratch.src, self.src_words, self.center - self.offsets[i]);
        }
    }

    /// Sizes and missing counts for a subset given as a word mask over base indices.
    pub fn counts_for_mask(&self, mask: &[u64], scratch: &mut KernelScratch) -> SubsetCounts {
        let mut present = std::mem::take(&mut scratch.present);
        present.clear();
        present.extend(BitIter::new(mask));
        let c = self.counts(&present, scratch);
        scratch.present = present;
        c
    }

    pub fn counts(&self, present: &[usize], scratch: &mut KernelScratch) -> SubsetCounts {
        self.compute(present, scratch);
        let sums = popcount(&scratch.sums);
        let diffs = popcount(&scratch.diffs);
        SubsetCounts {
            size: present.len(),
            sums,
            diffs,
            missing_sums: self.potential_sum_count - sums,
            missing_diffs: self.potential_diff_count - diffs,
        }
    }

    /// Grid index of a sum point, if it lies in the grid.
    pub fn sum_index(&self, p: &Point) -> Option<usize> {
        let mut idx = 0;
        for k in 0..self.dim {
            let d = p.0[k] - 2 * self.lo[k];
            if d < 0 || d > 2 * self.ext[k] - 2 {
                return None;
            }
            idx += d as usize * self.strides[k];
        }
        Some(idx)
    }

    /// Grid index of a difference point, if it lies in the grid.
    pub fn diff_index(&self, p: &Point) -> Option<usize> {
        let mut idx = 0;
        for k in 0..self.dim {
            let d = p.0[k] + self.ext[k] - 1;
            if d < 0 || d > 2 * self.ext[k] - 2 {
                return None;
            }
            idx += d as usize * self.strides[k];
        }
        Some(idx)
    }

    fn digits(&self, mut idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim];
        for k in 0..self.dim {
            out[k] = (idx / self.strides[k]) as i64;
            idx %= self.strides[k];
        }
        out
    }

    pub fn sum_point(&self, idx: usize) -> Point {
        let mut d = self.digits(idx);
        for k in 0..self.dim {
            d[k] += 2 * self.lo[k];
        }
        Point(d)
    }

    pub fn diff_point(&self, idx: usize) -> Point {
        let mut d = self.digits(idx);
        for k in 0..self.dim {
            d[k] -= self.ext[k] - 1;
        }
        Point(d)
    }

    pub fn potential_sums(&self) -> &[u64] {
        &self.potential_sums
    }

    pub fn potential_diffs(&self) -> &[u64] {
        &self.potential_diffs
    }

    /// Decodes a sum bitmap into a sorted [`LatticeSet`].
    pub fn decode_sums(&self, bits: &[u64]) -> LatticeSet {
        LatticeSet::from_points(self.dim, BitIter::new(bits).map(|i| self.sum_point(i)))
    }

    pub fn decode_diffs(&self, bits: &[u64]) -> LatticeSet {
        LatticeSet::from_points(self.dim, BitIter::new(bits).map(|i| self.diff_point(i)))
    }

    pub fn words(&self) -> usize {
        self.words
    }
}

/// Lattice points of `nP`, found by scanning the dilated bounding box.
pub fn enumerate_lattice(p: &Polytope, n: i64) -> Result<LatticeSet> {
    enumerate_lattice_capped(p, n, DEFAULT_SCAN_CAP)
}

pub fn enumerate_lattice_capped(p: &Polytope, n: i64, cap: u128) -> Result<LatticeSet> {
    if n < 1 {
        return Err(Error::InvalidInput(format!("dilation must be positive, got {n}")));
    }
    let (lo, hi) = p.bounding_box();
    let lo: Vec<i64> = lo.iter().map(|c| c * n).collect();
    let hi: Vec<i64> = hi.iter().map(|c| c * n).collect();
    let candidates: u128 = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as u128).product();
    if candidates > cap {
        return Err(Error::SizeLimit { candidates, cap });
    }
    let dim = p.dim();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        if p.contains_dilated(&cur, n) {
            out.push(Point(cur.clone()));
        }
        // odometer, last coordinate fastest: yields lexicographic order
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(LatticeSet::from_points(dim, out));
            }
            k -= 1;
            if cur[k] < hi[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = lo[k];
        }
    }
}

/// `A + A`.
pub fn sumset(a: &LatticeSet) -> LatticeSet {
    if a.is_empty() {
        return LatticeSet::empty(a.dim());
    }
    let kernel = AdditiveKernel::new(a);
    kernel.decode_sums(kernel.potential_sums())
}

/// `A - A`.
pub fn diffset(a: &LatticeSet) -> LatticeSet {
    if a.is_empty() {
        return LatticeSet::empty(a.dim());
    }
    let kernel = AdditiveKernel::new(a);
    kernel.decode_diffs(kernel.potential_diffs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MissingCounts {
    pub missing_sums: usize,
    pub missing_diffs: usize,
    pub sum_witnesses: Vec<Point>,
    pub diff_witnesses: Vec<Point>,
}

/// Sums of `L(nP) + L(nP)` and differences of `L(nP) - L(nP)` absent from
/// `A + A` and `A - A`. The mask's base must be `L(nP)`.
pub fn missing_counts(mask: &SubsetMask<'_>, p: &Polytope, n: i64) -> MissingCounts {
    debug_assert!(mask.base().iter().all(|q| p.contains_dilated(&q.0, n)));
    let kernel = AdditiveKernel::new(mask.base());
    missing_with_kernel(&kernel, mask)
}

pub fn missing_with_kernel(kernel: &AdditiveKernel, mask: &SubsetMask<'_>) -> MissingCounts {
    let mut scratch = kernel.scratch();
    let present: Vec<usize> = mask.indices().collect();
    kernel.compute(&present, &mut scratch);
    let missing_s: Vec<u64> = kernel
        .potential_sums()
        .iter()
        .zip(&scratch.sums)
        .map(|(p, a)| p & !a)
        .collect();
    let missing_d: Vec<u64> = kernel
        .potential_diffs()
        .iter()
        .zip(&scratch.diffs)
        .map(|(p, a)| p & !a)
        .collect();
    let sum_witnesses: Vec<Point> = kernel.decode_sums(&missing_s).points().to_vec();
    let diff_witnesses: Vec<Point> = kernel.decode_diffs(&missing_d).points().to_vec();
    MissingCounts {
        missing_sums: sum_witnesses.len(),
        missing_diffs: diff_witnesses.len(),
        sum_witnesses,
        diff_witnesses,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sum,
    Diff,
}

/// Number of lattice `x ∈ nP` with `k - x ∈ nP` (sum) or `x + k ∈ nP` (diff).
pub fn intersection_count(p: &Polytope, n: i64, k: &Point, mode: Mode) -> Result<u64> {
    let lattice = enumerate_lattice(p, n)?;
    Ok(intersection_count_in(p, n, &lattice, k, mode))
}

pub fn intersection_count_in(p: &Polytope, n: i64, lattice: &LatticeSet, k: &Point, mode: Mode) -> u64 {
    lattice
        .iter()
        .filter(|x| {
            let y = match mode {
                Mode::Sum => k - *x,
                Mode::Diff => *x + k,
            };
            p.contains_dilated(&y.0, n)
        })
        .count() as u64
}

/// Nonzero differences with exactly one ordered representation `s1 - s2`.
/// Representation counts saturate at two.
pub fn uniquely_formed_diffs(a: &LatticeSet) -> LatticeSet {
    if a.is_empty() {
        return LatticeSet::empty(a.dim());
    }
    let kernel = AdditiveKernel::new(a);
    let mut src = vec![0u64; kernel.words];
    for &o in &kernel.offsets {
        src[o / 64] |= 1 << (o % 64);
    }
    let mut once = vec![0u64; kernel.words];
    let mut twice = vec![0u64; kernel.words];
    let mut shifted = vec![0u64; kernel.words];
    for &o in &kernel.offsets {
        shifted.iter_mut().for_each(|w| *w = 0);
        or_shifted(&mut shifted, &src, kernel.src_words, kernel.center - o);
        for i in 0..kernel.words {
            twice[i] |= once[i] & shifted[i];
            once[i] |= shifted[i];
        }
    }
    let c = kernel.center;
    once[c / 64] &= !(1 << (c % 64));
    let unique: Vec<u64> = once.iter().zip(&twice).map(|(o, t)| o & !t).collect();
    kernel.decode_diffs(&unique)
}

/// Affine parameterization `t ↦ base_point + t·step`, `0 ≤ t ≤ length`, of the
/// lattice points on a dilated edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeMap {
    pub base_point: Point,
    pub step: Point,
    pub length: i64,
}

impl EdgeMap {
    pub fn at(&self, t: i64) -> Point {
        Point(
            self.base_point
                .0
                .iter()
                .zip(&self.step.0)
                .map(|(b, s)| b + t * s)
                .collect(),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..=self.length).map(|t| self.at(t))
    }
}

/// Lattice count of edge `edge` at dilation 1 minus one (`b_E`).
pub fn edge_lattice_length(p: &Polytope, edge: usize) -> i64 {
    let (a, b) = p.edges()[edge];
    (p.vertex(b) - p.vertex(a)).content()
}

/// Parameterizes `L(nE)` starting from the endpoint `from_vertex`.
pub fn edge_map(p: &Polytope, edge: usize, n: i64, from_vertex: usize) -> Result<EdgeMap> {
    let &(a, b) = p
        .edges()
        .get(edge)
        .ok_or_else(|| Error::InvalidInput(format!("edge index {edge} out of range")))?;
    let other = if from_vertex == a {
        b
    } else if from_vertex == b {
        a
    } else {
        return Err(Error::InvalidInput(format!(
            "vertex {from_vertex} is not an endpoint of edge {edge}"
        )));
    };
    let d = p.vertex(other) - p.vertex(from_vertex);
    let b_e = d.content();
    Ok(EdgeMap { base_point: p.vertex(from_vertex).scale(n), step: d.primitive(), length: n * b_e })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    SumDominant,
    Balanced,
    DifferenceDominant,
}

impl Class {
    pub fn from_sizes(sums: usize, diffs: usize) -> Class {
        match sums.cmp(&diffs) {
            std::cmp::Ordering::Greater => Class::SumDominant,
            std::cmp::Ordering::Equal => Class::Balanced,
            std::cmp::Ordering::Less => Class::DifferenceDominant,
        }
    }
}

/// Compares `|A + A|` with `|A - A|`. `A` must be a nonempty subset of `base`.
pub fn classify(a: &LatticeSet, base: &LatticeSet) -> Result<Class> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a.is_subset(base) {
        return Err(Error::InvalidInput("set is not contained in the base set".into()));
    }
    Ok(Class::from_sizes(sumset(a).len(), diffset(a).len()))
}
