//! Fringe sets: fixed presence patterns near the vertices of `nP` that pin
//! down exactly which sums and differences close to the boundary go missing.
//!
//! The one-dimensional end sets are found by search and accepted only if an
//! explicit interval model confirms their missing counts (see
//! [`validate_fringe_1d`]).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Polytope};
use crate::lattice::{edge_lattice_length, edge_map, enumerate_lattice, EdgeMap, LatticeSet};
use crate::point::Point;

/// Largest window radius the bit-parallel search supports.
pub const MAX_WINDOW: u32 = 62;

/// One-dimensional end sets on `{0, …, r_prime}`.
///
/// `low` sits at the start of a segment; `high_reflected` lists distances
/// from the far end, i.e. position `j` means the point `N - j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fringe1D {
    pub r_prime: u32,
    pub low: Vec<u32>,
    pub high_reflected: Vec<u32>,
    pub s: u32,
    pub d: u32,
}

/// Checks end sets against the interval model
/// `A_N = low ∪ [r'+1, N-r'-1] ∪ (N - high_reflected)` for `N = 3r'+3` and
/// `N = 3r'+4`: exactly `s` missing sums, all within `r'` of either end of
/// `[0, 2N]`, and exactly `2d` missing differences, all within `r'` of `±N`.
pub fn validate_fringe_1d(low: &[u32], high_reflected: &[u32], r_prime: u32, s: u32, d: u32) -> bool {
    if low.iter().chain(high_reflected).any(|&x| x > r_prime) {
        return false;
    }
    let r = r_prime as i64;
    [3 * r + 3, 3 * r + 4].into_iter().all(|n| {
        let mut present = vec![false; n as usize + 1];
        for &x in low {
            present[x as usize] = true;
        }
        for x in r + 1..n - r {
            present[x as usize] = true;
        }
        for &x in high_reflected {
            present[(n - x as i64) as usize] = true;
        }
        let elems: Vec<i64> = (0..=n).filter(|&x| present[x as usize]).collect();

        let mut sums = vec![false; 2 * n as usize + 1];
        let mut diffs = vec![false; 2 * n as usize + 1];
        for &a in &elems {
            for &b in &elems {
                sums[(a + b) as usize] = true;
                diffs[(a - b + n) as usize] = true;
            }
        }
        let missing_sums: Vec<i64> = (0..=2 * n).filter(|&x| !sums[x as usize]).collect();
        let missing_diffs: Vec<i64> = (-n..=n).filter(|&x| !diffs[(x + n) as usize]).collect();
        missing_sums.len() == s as usize
            && missing_sums.iter().all(|&x| x <= r || x >= 2 * n - r)
            && missing_diffs.len() == 2 * d as usize
            && missing_diffs.iter().all(|&x| x.abs() >= n - r)
    })
}

fn fringe_cache() -> &'static Mutex<HashMap<(u32, u32), Fringe1D>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Fringe1D>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest window `r' ≤ r_max` carrying end sets with exactly `s` missing
/// sums and `d` missing differences per sign.
///
/// Both segment endpoints are kept present, so the sets also work when
/// placed on the edges of a higher-dimensional polytope. Search order is `r'`
/// ascending, then depth-first over positions from the ends inward with
/// (low bit, high bit) tried present-first. Missing sums and differences at
/// position `k` depend only on positions `≤ k`, which is what makes the
/// prefix pruning exact.
pub fn find_fringe_1d(s: u32, d: u32, r_max: u32) -> Result<Fringe1D> {
    if let Some(hit) = fringe_cache().lock().expect("fringe cache poisoned").get(&(s, d)) {
        if hit.r_prime <= r_max {
            return Ok(hit.clone());
        }
        return Err(Error::NotFound { r_max });
    }
    let found = search_fringe_1d(s, d, r_max.min(MAX_WINDOW)).ok_or(Error::NotFound { r_max })?;
    if !validate_fringe_1d(&found.low, &found.high_reflected, found.r_prime, s, d) {
        return Err(Error::InternalInconsistency(format!(
            "search result for (s, d) = ({s}, {d}) rejected by the interval model"
        )));
    }
    fringe_cache()
        .lock()
        .expect("fringe cache poisoned")
        .insert((s, d), found.clone());
    Ok(found)
}

struct Search {
    s: u32,
    d: u32,
    r_prime: u32,
    low: u64,
    high: u64,
}

impl Search {
    fn dfs(&mut self, k: u32, missing_sums: u32, missing_diffs: u32) -> bool {
        if k > self.r_prime {
            return missing_sums == self.s && missing_diffs == self.d;
        }
        let left = self.r_prime - k + 1;
        if missing_sums + 2 * left < self.s || missing_diffs + left < self.d {
            return false;
        }
        for (lb, hb) in [(1u64, 1u64), (1, 0), (0, 1), (0, 0)] {
            let low = self.low | lb << k;
            let high = self.high | hb << k;
            let shift = 63 - k;
            let low_sum = low & (low.reverse_bits() >> shift) != 0;
            let high_sum = high & (high.reverse_bits() >> shift) != 0;
            let diff = low & (high.reverse_bits() >> shift) != 0;
            let ms = missing_sums + u32::from(!low_sum) + u32::from(!high_sum);
            let md = missing_diffs + u32::from(!diff);
            if ms > self.s || md > self.d {
                continue;
            }
            let (saved_low, saved_high) = (self.low, self.high);
            self.low = low;
            self.high = high;
            if self.dfs(k + 1, ms, md) {
                return true;
            }
            self.low = saved_low;
            self.high = saved_high;
        }
        false
    }
}

fn bits_to_vec(mask: u64) -> Vec<u32> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

fn search_fringe_1d(s: u32, d: u32, r_max: u32) -> Option<Fringe1D> {
    for r_prime in 0..=r_max {
        let mut search = Search { s, d, r_prime, low: 1, high: 1 };
        if search.dfs(1, 0, 0) {
            return Some(Fringe1D {
                r_prime,
                low: bits_to_vec(search.low),
                high_reflected: bits_to_vec(search.high),
                s,
                d,
            });
        }
    }
    None
}

/// Edge points kept near one end of an edge: exactly `gap_size` positions of
/// `{0, …, window}` are absent, yet every sum along the edge stays formed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeGapSet {
    pub window: u32,
    pub present: Vec<u32>,
    pub gap_size: u32,
    /// Whether the two-block pattern `[0, d-1] ∪ [2d, 3d-1]` would also have
    /// passed the sum check. It never does for `d ≥ 1`: `2d - 1` is not a sum.
    pub two_block_valid: bool,
}

impl EdgeGapSet {
    pub fn absent(&self) -> Vec<u32> {
        (0..=self.window).filter(|x| !self.present.contains(x)).collect()
    }
}

/// `[0, d-1] ∪ [2d, 3d-1]` on the window `[0, 3d-1]`.
pub fn two_block_gap_pattern(d: u32) -> (u32, Vec<u32>) {
    let present = (0..d).chain(2 * d..3 * d).collect();
    (3 * d.max(1) - 1, present)
}

fn gap_set_is_valid(window: u32, present: &[u32], d: u32) -> bool {
    let absent = (0..=window).filter(|x| !present.contains(x)).count() as u32;
    let full: Vec<u32> = (0..=window).collect();
    absent == d && validate_fringe_1d(present, &full, window, 0, 0)
}

/// Gap set with exactly `d` absent positions and no missing sums, from the
/// family `{0..2d} ∪ {2d+2, 2d+4, …, 4d}` on window `4d`. Falls back to an
/// exhaustive search over small windows should a family member fail.
pub fn find_edge_gap_set(d: u32) -> Result<EdgeGapSet> {
    let (bw, bp) = two_block_gap_pattern(d);
    let two_block_valid = d == 0 || gap_set_is_valid(bw, &bp, d);
    let window = 4 * d;
    let present: Vec<u32> = (0..=2 * d).chain((1..=d).map(|i| 2 * d + 2 * i)).collect();
    if gap_set_is_valid(window, &present, d) {
        return Ok(EdgeGapSet { window, present, gap_size: d, two_block_valid });
    }
    for window in d..=4 * d + 4 {
        for absent in geometry::combinations(window as usize, d as usize) {
            // positions 1..=window; the endpoint itself stays present
            let absent: Vec<u32> = absent.iter().map(|&i| i as u32 + 1).collect();
            let present: Vec<u32> = (0..=window).filter(|x| !absent.contains(x)).collect();
            if gap_set_is_valid(window, &present, d) {
                return Ok(EdgeGapSet { window, present, gap_size: d, two_block_valid });
            }
        }
    }
    Err(Error::NotFound { r_max: 4 * d + 4 })
}

/// Euclidean radius, kept exactly as a rational square `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Radius {
    sq_num: i128,
    sq_den: i128,
}

impl Radius {
    pub fn from_int(r: i64) -> Self {
        assert!(r >= 0, "radius must be nonnegative");
        Radius { sq_num: (r as i128) * (r as i128), sq_den: 1 }
    }

    /// `p / q`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(p >= 0 && q > 0, "radius must be a nonnegative ratio");
        Self::from_squared((p as i128) * (p as i128), (q as i128) * (q as i128))
    }

    /// Radius whose square is `num / den`.
    pub fn from_squared(num: i128, den: i128) -> Self {
        assert!(num >= 0 && den > 0, "squared radius must be nonnegative");
        let g = gcd_i128(num, den).max(1);
        Radius { sq_num: num / g, sq_den: den / g }
    }

    /// Squared distance `dist_sq` lies within the radius.
    pub fn covers(&self, dist_sq: i64) -> bool {
        (dist_sq as i128) * self.sq_den <= self.sq_num
    }

    pub fn max(self, other: Radius) -> Radius {
        if self.sq_num * other.sq_den >= other.sq_num * self.sq_den {
            self
        } else {
            other
        }
    }

    /// `2r < sqrt(dist_sq)`.
    pub fn diameter_below(&self, dist_sq: i64) -> bool {
        4 * self.sq_num < (dist_sq as i128) * self.sq_den
    }

    pub fn squared(&self) -> (i128, i128) {
        (self.sq_num, self.sq_den)
    }

    pub fn to_f64(&self) -> f64 {
        (self.sq_num as f64 / self.sq_den as f64).sqrt()
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i128(b, a % b)
    }
}

/// Points of `L(nP)` within distance `r` of a dilated vertex (`B`) and the rest (`M`).
pub fn fringe_region(p: &Polytope, n: i64, r: Radius) -> Result<(LatticeSet, LatticeSet)> {
    let lattice = enumerate_lattice(p, n)?;
    Ok(split_region(p, n, &lattice, r))
}

fn split_region(p: &Polytope, n: i64, lattice: &LatticeSet, r: Radius) -> (LatticeSet, LatticeSet) {
    let corners: Vec<Point> = p.vertices().iter().map(|v| v.scale(n)).collect();
    let (near, far): (Vec<Point>, Vec<Point>) = lattice
        .iter()
        .cloned()
        .partition(|x| corners.iter().any(|c| r.covers(x.dist_sq(c))));
    (LatticeSet::from_points(p.dim(), near), LatticeSet::from_points(p.dim(), far))
}

/// Which construction [`assemble_fringe`] follows. Serialized as
/// `theorem1` / `theorem2` on the command line and in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FringeMode {
    /// End sets on a pair of parallel edges at two strictly antipodal
    /// vertices; needs a locally point symmetric polytope.
    #[serde(rename = "theorem1")]
    AntipodalEdges,
    /// Gap set on an edge whose points form unique differences with an
    /// opposite vertex, plus sum-only end sets on a second edge. Falls back to
    /// [`FringeMode::AntipodalEdges`] on locally point symmetric input.
    #[serde(rename = "theorem2")]
    EdgeGap,
}

impl std::str::FromStr for FringeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem1" => Ok(FringeMode::AntipodalEdges),
            "theorem2" => Ok(FringeMode::EdgeGap),
            other => Err(Error::InvalidInput(format!("unknown fringe mode {other:?}"))),
        }
    }
}

/// A placed window: which edge, from which endpoint, and the 1-D positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlacedWindow {
    pub edge: usize,
    pub map: EdgeMap,
    pub present: Vec<i64>,
    pub absent: Vec<i64>,
}

/// Forced-present / forced-absent / free partition of `L(nP)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FringeAssignment {
    pub mode: FringeMode,
    pub n: i64,
    pub s: u32,
    pub d: u32,
    /// Radius actually used: the requested one, enlarged to cover every window.
    pub radius: Radius,
    pub requested_radius: Radius,
    pub forced_present: LatticeSet,
    pub forced_absent: LatticeSet,
    pub free: LatticeSet,
    pub predicted_sums: usize,
    pub predicted_diffs: usize,
    /// `false` when only a lower bound on missing differences is predicted.
    pub diffs_exact: bool,
    pub windows: Vec<PlacedWindow>,
    pub window_radius: u32,
    pub gap_set: Option<EdgeGapSet>,
}

impl FringeAssignment {
    /// The three parts cover `lattice` exactly once.
    pub fn partitions(&self, lattice: &LatticeSet) -> bool {
        let total = self.forced_present.len() + self.forced_absent.len() + self.free.len();
        total == lattice.len()
            && lattice.iter().all(|x| {
                let hits = [&self.forced_present, &self.forced_absent, &self.free]
                    .iter()
                    .filter(|s| s.contains(x))
                    .count();
                hits == 1
            })
    }
}

/// Fringe-region search radius for the 1-D end sets.
pub const DEFAULT_R_MAX: u32 = 32;

/// Builds a fringe assignment on `L(nP)` targeting `s` missing sums and `2d`
/// missing differences.
pub fn assemble_fringe(
    p: &Polytope,
    n: i64,
    s: u32,
    d: u32,
    r: Radius,
    mode: FringeMode,
) -> Result<FringeAssignment> {
    let verdict = geometry::is_locally_point_symmetric(p)?;
    match mode {
        FringeMode::AntipodalEdges if !verdict.lps => Err(Error::NotLps),
        FringeMode::AntipodalEdges => antipodal_edges(p, n, s, d, r, &verdict.pairing.unwrap_or_default()),
        FringeMode::EdgeGap if verdict.lps => {
            let mut fa = antipodal_edges(p, n, s, d, r, &verdict.pairing.unwrap_or_default())?;
            fa.mode = FringeMode::EdgeGap;
            Ok(fa)
        }
        FringeMode::EdgeGap => edge_gap(p, n, s, d, r),
    }
}

/// Squared Euclidean length of `t` steps.
fn window_reach(map: &EdgeMap, t: u32) -> Radius {
    Radius::from_squared((t as i128) * (t as i128) * map.step.norm_sq() as i128, 1)
}

fn antipodal_edges(
    p: &Polytope,
    n: i64,
    s: u32,
    d: u32,
    r: Radius,
    pairing: &[(usize, usize)],
) -> Result<FringeAssignment> {
    let fr = find_fringe_1d(s, d, DEFAULT_R_MAX)?;
    let mut choice = None;
    'pairs: for &(v1, v2) in pairing {
        let opposite: Vec<(usize, Point)> = p
            .incident_edges(v2)
            .map(|e| (e, edge_direction(p, e, v2)))
            .collect();
        for e1 in p.incident_edges(v1) {
            let dir = edge_direction(p, e1, v1);
            let neg = -&dir;
            if let Some((e2, _)) = opposite.iter().find(|(_, d2)| *d2 == neg) {
                choice = Some((v1, v2, e1, *e2));
                break 'pairs;
            }
        }
    }
    let (v1, v2, e1, e2) = choice.ok_or_else(|| {
        Error::InternalInconsistency("no parallel edge pair at an antipodal vertex pair".into())
    })?;

    let low_map = edge_map(p, e1, n, v1)?;
    // Same linear part as `low_map`: start from the far endpoint of e2.
    let (a2, b2) = p.edges()[e2];
    let u2 = if a2 == v2 { b2 } else { a2 };
    let high_map = edge_map(p, e2, n, u2)?;
    debug_assert_eq!(low_map.step, high_map.step);

    let rp = fr.r_prime as i64;
    let low = window(&low_map, e1, (0..=rp).map(|t| (t, fr.low.contains(&(t as u32)))));
    let top = high_map.length;
    let high = window(
        &high_map,
        e2,
        (0..=rp).map(|j| (top - j, fr.high_reflected.contains(&(j as u32)))),
    );
    let radius = r
        .max(window_reach(&low_map, fr.r_prime))
        .max(window_reach(&high_map, fr.r_prime));
    finish(
        p,
        n,
        s,
        d,
        r,
        radius,
        FringeMode::AntipodalEdges,
        vec![low, high],
        fr.r_prime,
        None,
        true,
    )
}

fn edge_gap(p: &Polytope, n: i64, s: u32, d: u32, r: Radius) -> Result<FringeAssignment> {
    let (_, e1) = geometry::find_unique_diff_edge(p)
        .map_err(|e| Error::NoUniqueDiffEdge(e.to_string()))?
        .ok_or_else(|| Error::NoUniqueDiffEdge("no vertex/edge witness".into()))?;
    let gap = find_edge_gap_set(d)?;
    let fr = find_fringe_1d(s, 0, DEFAULT_R_MAX)?;

    let e2 = (0..p.edges().len())
        .find(|&e| e != e1)
        .ok_or_else(|| Error::InternalInconsistency("polytope has a single edge".into()))?;
    let (a1, b1) = p.edges()[e1];
    let (a2, b2) = p.edges()[e2];
    let gap_end = if a1 != a2 && a1 != b2 { a1 } else { b1 };

    let gap_map = edge_map(p, e1, n, gap_end)?;
    let gap_window = window(
        &gap_map,
        e1,
        (0..=gap.window as i64).map(|t| (t, gap.present.contains(&(t as u32)))),
    );
    let sum_map = edge_map(p, e2, n, a2)?;
    let rp = fr.r_prime as i64;
    let top = sum_map.length;
    let low = window(&sum_map, e2, (0..=rp).map(|t| (t, fr.low.contains(&(t as u32)))));
    let high = window(
        &sum_map,
        e2,
        (0..=rp).map(|j| (top - j, fr.high_reflected.contains(&(j as u32)))),
    );
    let radius = r
        .max(window_reach(&gap_map, gap.window))
        .max(window_reach(&sum_map, fr.r_prime));
    finish(
        p,
        n,
        s,
        d,
        r,
        radius,
        FringeMode::EdgeGap,
        vec![gap_window, low, high],
        fr.r_prime,
        Some(gap),
        false,
    )
}

/// Primitive direction of edge `e` leaving vertex `v`.
fn edge_direction(p: &Polytope, e: usize, v: usize) -> Point {
    let (a, b) = p.edges()[e];
    let other = if a == v { b } else { a };
    (p.vertex(other) - p.vertex(v)).primitive()
}

fn window(map: &EdgeMap, edge: usize, positions: impl Iterator<Item = (i64, bool)>) -> PlacedWindow {
    let mut present = Vec::new();
    let mut absent = Vec::new();
    for (t, on) in positions {
        if on {
            present.push(t);
        } else {
            absent.push(t);
        }
    }
    PlacedWindow { edge, map: map.clone(), present, absent }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &Polytope,
    n: i64,
    s: u32,
    d: u32,
    requested: Radius,
    radius: Radius,
    mode: FringeMode,
    windows: Vec<PlacedWindow>,
    window_radius: u32,
    gap_set: Option<EdgeGapSet>,
    diffs_exact: bool,
) -> Result<FringeAssignment> {
    let m = p.num_vertices();
    for i in 0..m {
        for j in i + 1..m {
            let dist_sq = p.vertex(i).dist_sq(p.vertex(j)) * n * n;
            if !radius.diameter_below(dist_sq) {
                return Err(Error::WindowOverlap(format!(
                    "radius {:.3} balls around vertices {i} and {j} of {n}P intersect; increase n",
                    radius.to_f64()
                )));
            }
        }
    }
    for w in &windows {
        if w.map.length < (w.present.len() + w.absent.len()) as i64 - 1 {
            return Err(Error::WindowOverlap(format!("edge {} is shorter than its window", w.edge)));
        }
    }

    let lattice = enumerate_lattice(p, n)?;
    let (near, far) = split_region(p, n, &lattice, radius);
    let absent = LatticeSet::from_points(
        p.dim(),
        windows.iter().flat_map(|w| w.absent.iter().map(|&t| w.map.at(t))),
    );
    let forced_on = LatticeSet::from_points(
        p.dim(),
        windows.iter().flat_map(|w| w.present.iter().map(|&t| w.map.at(t))),
    );
    if forced_on.iter().any(|x| absent.contains(x)) {
        return Err(Error::WindowOverlap("windows disagree on a shared point".into()));
    }
    if !absent.is_subset(&near) || !forced_on.is_subset(&near) {
        return Err(Error::InternalInconsistency("window escapes the fringe region".into()));
    }
    let forced_present = near.difference(&absent);
    Ok(FringeAssignment {
        mode,
        n,
        s,
        d,
        radius,
        requested_radius: requested,
        forced_present,
        forced_absent: absent,
        free: far,
        predicted_sums: s as usize,
        predicted_diffs: 2 * d as usize,
        diffs_exact,
        windows,
        window_radius,
        gap_set,
    })
}

/// Lattice length `b_E` of the edge a window sits on.
pub fn window_edge_length(p: &Polytope, w: &PlacedWindow) -> i64 {
    edge_lattice_length(p, w.edge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tests::{hexagon, quadrilateral, square, triangle};
    use crate::lattice::{missing_counts, MissingCounts, SubsetMask};

    #[test]
    fn full_windows_validate() {
        for r in 0..6u32 {
            let full: Vec<u32> = (0..=r).collect();
            assert!(validate_fringe_1d(&full, &full, r, 0, 0));
        }
    }

    #[test]
    fn one_missing_sum() {
        for r in 3..8u32 {
            let low: Vec<u32> = (0..=r).filter(|&x| x != 1).collect();
            let full: Vec<u32> = (0..=r).collect();
            assert!(validate_fringe_1d(&low, &full, r, 1, 0));
            let low: Vec<u32> = (1..=r).collect();
            assert!(!validate_fringe_1d(&low, &full, r, 1, 0));
        }
    }

    #[test]
    fn small_targets() {
        let f = find_fringe_1d(0, 0, 32).unwrap();
        assert_eq!((f.r_prime, f.low.clone(), f.high_reflected.clone()), (0, vec![0], vec![0]));
        let f = find_fringe_1d(1, 0, 32).unwrap();
        assert!(validate_fringe_1d(&f.low, &f.high_reflected, f.r_prime, 1, 0));
        let f = find_fringe_1d(0, 1, 32).unwrap();
        assert_eq!(f.r_prime, 7);
        assert!(validate_fringe_1d(&f.low, &f.high_reflected, f.r_prime, 0, 1));
    }

    #[test]
    fn gap_sets() {
        let g = find_edge_gap_set(0).unwrap();
        assert_eq!((g.window, g.gap_size), (0, 0));
        let g = find_edge_gap_set(1).unwrap();
        assert_eq!((g.window, g.present.clone(), g.absent()), (4, vec![0, 1, 2, 4], vec![3]));
        assert!(!g.two_block_valid);
        let g = find_edge_gap_set(2).unwrap();
        assert_eq!((g.window, g.present.clone(), g.absent()), (8, vec![0, 1, 2, 3, 4, 6, 8], vec![5, 7]));
        for d in 1..=5 {
            let (w, present) = two_block_gap_pattern(d);
            assert!(!gap_set_is_valid(w, &present, d));
        }
    }

    #[test]
    fn radius_arithmetic() {
        let r = Radius::from_int(2);
        assert!(r.covers(4));
        assert!(!r.covers(5));
        let half = Radius::from_ratio(3, 2);
        assert!(half.covers(2));
        assert!(!half.covers(3));
        assert_eq!(r.max(half), r);
        assert_eq!(Radius::from_squared(20, 4), Radius::from_squared(5, 1));
        assert!(Radius::from_int(3).diameter_below(37));
        assert!(!Radius::from_int(3).diameter_below(36));
    }

    #[test]
    fn square_corner_region() {
        let (b, m) = fringe_region(&square(), 10, Radius::from_int(2)).unwrap();
        assert_eq!(b.len(), 24);
        assert_eq!(b.len() + m.len(), 121);
        let (b, _) = fringe_region(&square(), 10, Radius::from_int(0)).unwrap();
        assert_eq!(b.len(), 4);
        let (_, m) = fringe_region(&square(), 3, Radius::from_int(5)).unwrap();
        assert!(m.is_empty());
    }

    fn fill_free(p: &Polytope, fa: &FringeAssignment) -> MissingCounts {
        let base = enumerate_lattice(p, fa.n).unwrap();
        assert!(fa.partitions(&base));
        let mut mask = SubsetMask::empty(&base);
        for x in fa.forced_present.iter().chain(fa.free.iter()) {
            mask.set(base.index_of(x).unwrap(), true);
        }
        missing_counts(&mask, p, fa.n)
    }

    #[test]
    fn square_full_fringe() {
        let fa = assemble_fringe(&square(), 20, 0, 0, Radius::from_int(3), FringeMode::AntipodalEdges).unwrap();
        assert!(fa.forced_absent.is_empty());
        assert_eq!((fa.predicted_sums, fa.predicted_diffs), (0, 0));
        let mc = fill_free(&square(), &fa);
        assert_eq!((mc.missing_sums, mc.missing_diffs), (0, 0));
    }

    #[test]
    fn saturated_middle_gives_exact_counts() {
        for (s, d) in [(1, 0), (0, 1), (1, 1), (2, 1), (0, 2)] {
            let fa = assemble_fringe(&square(), 40, s, d, Radius::from_int(3), FringeMode::AntipodalEdges)
                .unwrap();
            let mc = fill_free(&square(), &fa);
            assert_eq!((mc.missing_sums, mc.missing_diffs), (s as usize, 2 * d as usize), "(s,d)=({s},{d})");
        }
    }

    #[test]
    fn hexagon_fringe() {
        let h = hexagon();
        let fa = assemble_fringe(&h, 14, 1, 1, Radius::from_int(3), FringeMode::AntipodalEdges).unwrap();
        assert!(!fa.forced_absent.is_empty());
        assert_eq!((fa.predicted_sums, fa.predicted_diffs), (1, 2));
        let mc = fill_free(&h, &fa);
        assert_eq!((mc.missing_sums, mc.missing_diffs), (1, 2));
    }

    #[test]
    fn segment_fringe() {
        let seg = Polytope::new(1, vec![Point(vec![0]), Point(vec![1])]).unwrap();
        for (s, d) in [(0, 0), (1, 0), (0, 1), (2, 2)] {
            let fa = assemble_fringe(&seg, 60, s, d, Radius::from_int(1), FringeMode::AntipodalEdges).unwrap();
            let mc = fill_free(&seg, &fa);
            assert_eq!((mc.missing_sums, mc.missing_diffs), (s as usize, 2 * d as usize));
        }
    }

    #[test]
    fn triangle_rejects_antipodal_edges() {
        let err = assemble_fringe(&triangle(), 20, 0, 0, Radius::from_int(3), FringeMode::AntipodalEdges);
        assert_eq!(err.unwrap_err(), Error::NotLps);
    }

    #[test]
    fn small_dilation_overlaps() {
        let err = assemble_fringe(&square(), 5, 0, 1, Radius::from_int(3), FringeMode::AntipodalEdges);
        assert!(matches!(err.unwrap_err(), Error::WindowOverlap(_)));
    }

    #[test]
    fn triangle_edge_gap() {
        let t = triangle();
        let fa = assemble_fringe(&t, 20, 0, 1, Radius::from_int(3), FringeMode::EdgeGap).unwrap();
        assert_eq!(fa.forced_absent.len(), 1);
        assert!(!fa.diffs_exact);
        let mc = fill_free(&t, &fa);
        assert_eq!(mc.missing_sums, 0);
        assert!(mc.missing_diffs >= 2);
    }

    #[test]
    fn edge_gap_with_missing_sums() {
        for p in [triangle(), quadrilateral()] {
            for (s, d) in [(1, 1), (2, 2), (0, 3)] {
                let fa = assemble_fringe(&p, 40, s, d, Radius::from_int(2), FringeMode::EdgeGap).unwrap();
                let mc = fill_free(&p, &fa);
                assert_eq!(mc.missing_sums, s as usize);
                assert!(mc.missing_diffs >= 2 * d as usize);
            }
        }
    }

    #[test]
    fn edge_gap_on_symmetric_input_uses_antipodal_edges() {
        let fa = assemble_fringe(&square(), 30, 1, 1, Radius::from_int(2), FringeMode::EdgeGap).unwrap();
        assert!(fa.diffs_exact);
        let mc = fill_free(&square(), &fa);
        assert_eq!((mc.missing_sums, mc.missing_diffs), (1, 2));
    }

    #[test]
    fn radius_grows_to_cover_windows() {
        let fa = assemble_fringe(&square(), 16, 0, 1, Radius::from_int(4), FringeMode::AntipodalEdges).unwrap();
        assert_eq!(fa.window_radius, 7);
        assert_eq!(fa.radius, Radius::from_int(7));
        assert_eq!(fa.requested_radius, Radius::from_int(4));
    }

    #[test]
    fn not_found_below_minimum() {
        assert_eq!(find_fringe_1d(0, 1, 3), Err(Error::NotFound { r_max: 3 }));
    }
}
