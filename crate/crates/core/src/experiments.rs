//! Exact enumeration and Monte Carlo estimation over subsets of `L(nP)`.
//!
//! Randomness is indexed, not shared: trial `i` draws from
//! [`rng_stream`]`(seed, i)`, and trials are grouped into fixed-size chunks
//! whose tallies are merged by addition. Results are therefore identical for
//! any thread count.

use std::collections::BTreeMap;
use std::ops::AddAssign;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fringe::{FringeAssignment, Radius};
use crate::geometry::{sa_pairs, Polytope};
use crate::lattice::{
    enumerate_lattice, intersection_count_in, popcount, AdditiveKernel, BitIter, Class,
    KernelScratch, LatticeSet, Mode, SubsetCounts,
};
use crate::point::Point;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Trials per work unit. Fixed so that chunking never depends on the pool size.
const CHUNK: u64 = 2048;

/// Default enumeration cap on `|L(nP)|`.
pub const DEFAULT_MAX_BITS: usize = 24;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        SplitMix64 { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform integer in `0..bound` (bound > 0), by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}

/// Generator for trial `index` under `seed`.
pub fn rng_stream(seed: u64, index: u64) -> SplitMix64 {
    SplitMix64::new(seed ^ mix64(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// Wilson score interval for `hits` successes in `trials`, clamped to `[0, 1]`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1 && hits <= trials, "need 0 <= hits <= trials, trials >= 1");
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if hits == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if hits == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (low, high)
}

/// Event tested on each subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    /// Exactly `s` missing sums and exactly `2d` missing differences.
    ExactSd { s: u32, d: u32 },
    /// Exactly `s` missing sums and at least `2d` missing differences.
    AtLeastD { s: u32, d: u32 },
    Mstd,
    Balanced,
    DiffDominant,
}

impl Classifier {
    pub fn name(&self) -> &'static str {
        match self {
            Classifier::ExactSd { .. } => "exact_sd",
            Classifier::AtLeastD { .. } => "at_least_d",
            Classifier::Mstd => "mstd",
            Classifier::Balanced => "balanced",
            Classifier::DiffDominant => "diff_dominant",
        }
    }

    /// Parses a classifier name; `s`/`d` apply to the parameterized kinds.
    pub fn parse(name: &str, s: u32, d: u32) -> Result<Self> {
        Ok(match name {
            "exact_sd" => Classifier::ExactSd { s, d },
            "at_least_d" => Classifier::AtLeastD { s, d },
            "mstd" => Classifier::Mstd,
            "balanced" => Classifier::Balanced,
            "diff_dominant" => Classifier::DiffDominant,
            other => return Err(Error::InvalidInput(format!("unknown classifier {other:?}"))),
        })
    }

    pub fn params(&self) -> (u32, u32) {
        match *self {
            Classifier::ExactSd { s, d } | Classifier::AtLeastD { s, d } => (s, d),
            _ => (0, 0),
        }
    }

    /// The empty set counts under full-region missing counts and belongs to
    /// none of the size classes.
    pub fn matches(&self, c: &SubsetCounts) -> bool {
        match *self {
            Classifier::ExactSd { s, d } => {
                c.missing_sums == s as usize && c.missing_diffs == 2 * d as usize
            }
            Classifier::AtLeastD { s, d } => {
                c.missing_sums == s as usize && c.missing_diffs >= 2 * d as usize
            }
            Classifier::Mstd => c.size > 0 && c.sums > c.diffs,
            Classifier::Balanced => c.size > 0 && c.sums == c.diffs,
            Classifier::DiffDominant => c.size > 0 && c.sums < c.diffs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub polytope: Polytope,
    pub n: i64,
    pub samples: u64,
    pub seed: u64,
    pub fringe: Option<FringeAssignment>,
    pub classifier: Classifier,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateResult {
    pub hits: u64,
    pub trials: u64,
    pub proportion: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimateResult {
    pub fn new(hits: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials, 1.96);
        EstimateResult { hits, trials, proportion: hits as f64 / trials as f64, ci_low, ci_high }
    }
}

/// Random subsets of `L(nP)` consistent with an optional fringe: forced
/// points fixed, every free point present with probability 1/2.
pub struct Sampler {
    base: LatticeSet,
    kernel: AdditiveKernel,
    forced: Vec<u64>,
    free: Vec<usize>,
}

impl Sampler {
    pub fn new(p: &Polytope, n: i64, fringe: Option<&FringeAssignment>) -> Result<Self> {
        let base = enumerate_lattice(p, n)?;
        let kernel = AdditiveKernel::new(&base);
        let words = base.len().div_ceil(64).max(1);
        let mut forced = vec![0u64; words];
        let free: Vec<usize> = match fringe {
            None => (0..base.len()).collect(),
            Some(fa) => {
                if fa.n != n || !fa.partitions(&base) {
                    return Err(Error::IncompatibleFringe(format!(
                        "fringe does not partition L({n}P) ({} lattice points)",
                        base.len()
                    )));
                }
                for x in &fa.forced_present {
                    let i = base.index_of(x).expect("partition checked");
                    forced[i / 64] |= 1 << (i % 64);
                }
                fa.free.iter().map(|x| base.index_of(x).expect("partition checked")).collect()
            }
        };
        Ok(Sampler { base, kernel, forced, free })
    }

    pub fn base(&self) -> &LatticeSet {
        &self.base
    }

    pub fn kernel(&self) -> &AdditiveKernel {
        &self.kernel
    }

    /// Writes trial `trial`'s subset into `mask` (words over base indices).
    pub fn draw(&self, seed: u64, trial: u64, mask: &mut Vec<u64>) {
        mask.clear();
        mask.extend_from_slice(&self.forced);
        let mut rng = rng_stream(seed, trial);
        for chunk in self.free.chunks(64) {
            let word = rng.next_u64();
            for (b, &i) in chunk.iter().enumerate() {
                if word >> b & 1 == 1 {
                    mask[i / 64] |= 1 << (i % 64);
                }
            }
        }
    }

    /// Runs `samples` trials and merges per-chunk tallies.
    pub fn run<T, F>(&self, samples: u64, seed: u64, threads: usize, per_trial: F) -> Result<T>
    where
        T: Default + AddAssign + Send,
        F: Fn(&mut T, &[u64], &mut KernelScratch) + Sync,
    {
        let chunks = samples.div_ceil(CHUNK);
        let work = || {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut tally = T::default();
                    let mut scratch = self.kernel.scratch();
                    let mut mask = Vec::with_capacity(self.forced.len());
                    for trial in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                        self.draw(seed, trial, &mut mask);
                        per_trial(&mut tally, &mask, &mut scratch);
                    }
                    tally
                })
                .reduce(T::default, |mut a, b| {
                    a += b;
                    a
                })
        };
        with_threads(threads, work)
    }
}

pub(crate) fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Hits(u64);

impl AddAssign for Hits {
    fn add_assign(&mut self, rhs: Hits) {
        self.0 += rhs.0;
    }
}

/// Monte Carlo proportion of subsets satisfying the classifier.
pub fn sample_estimate(cfg: &SampleConfig) -> Result<EstimateResult> {
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let sampler = Sampler::new(&cfg.polytope, cfg.n, cfg.fringe.as_ref())?;
    let classifier = cfg.classifier;
    let hits: Hits = sampler.run(cfg.samples, cfg.seed, cfg.threads, |tally: &mut Hits, mask, scratch| {
        let c = sampler.kernel.counts_for_mask(mask, scratch);
        if classifier.matches(&c) {
            tally.0 += 1;
        }
    })?;
    Ok(EstimateResult::new(hits.0, cfg.samples))
}

/// Exact joint distribution of (missing sums, missing differences) over all
/// `2^|L(nP)|` subsets, with the size-class totals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JointHistogram {
    pub lattice_size: usize,
    pub potential_sums: usize,
    pub potential_diffs: usize,
    pub total: u64,
    pub counts: BTreeMap<(usize, usize), u64>,
    pub mstd: u64,
    pub balanced: u64,
    pub diff_dominant: u64,
}

impl JointHistogram {
    /// Number of subsets satisfying `classifier`.
    pub fn count(&self, classifier: Classifier) -> u64 {
        match classifier {
            Classifier::ExactSd { s, d } => {
                self.counts.get(&(s as usize, 2 * d as usize)).copied().unwrap_or(0)
            }
            Classifier::AtLeastD { s, d } => self
                .counts
                .iter()
                .filter(|(&(ms, md), _)| ms == s as usize && md >= 2 * d as usize)
                .map(|(_, &c)| c)
                .sum(),
            Classifier::Mstd => self.mstd,
            Classifier::Balanced => self.balanced,
            Classifier::DiffDominant => self.diff_dominant,
        }
    }

    pub fn proportion(&self, classifier: Classifier) -> f64 {
        self.count(classifier) as f64 / self.total as f64
    }
}

#[derive(Clone, Debug, Default)]
struct EnumTally {
    width: usize,
    grid: Vec<u64>,
    classes: [u64; 3],
}

impl AddAssign for EnumTally {
    fn add_assign(&mut self, rhs: EnumTally) {
        if self.grid.is_empty() {
            *self = rhs;
            return;
        }
        if rhs.grid.is_empty() {
            return;
        }
        for (a, b) in self.grid.iter_mut().zip(&rhs.grid) {
            *a += b;
        }
        for k in 0..3 {
            self.classes[k] += rhs.classes[k];
        }
    }
}

/// Iterates every subset mask of `L(nP)`; requires `|L(nP)| ≤ max_bits`.
pub fn exact_enumerate(p: &Polytope, n: i64, max_bits: usize) -> Result<JointHistogram> {
    exact_enumerate_threads(p, n, max_bits, rayon::current_num_threads())
}

pub fn exact_enumerate_threads(p: &Polytope, n: i64, max_bits: usize, threads: usize) -> Result<JointHistogram> {
    let base = enumerate_lattice(p, n)?;
    if base.len() > max_bits || base.len() > 40 {
        return Err(Error::TooLarge { points: base.len(), cap: max_bits.min(40) });
    }
    let kernel = AdditiveKernel::new(&base);
    let ps = kernel.potential_sum_count();
    let pd = kernel.potential_diff_count();
    let width = pd + 1;
    let total: u64 = 1 << base.len();
    const ENUM_CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(ENUM_CHUNK);

    let tally = with_threads(threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut t = EnumTally { width, grid: vec![0; (ps + 1) * width], classes: [0; 3] };
                let mut scratch = kernel.scratch();
                let mut present = Vec::with_capacity(base.len());
                for mask in c * ENUM_CHUNK..((c + 1) * ENUM_CHUNK).min(total) {
                    present.clear();
                    present.extend(BitIter::new(std::slice::from_ref(&mask)));
                    let counts = kernel.counts(&present, &mut scratch);
                    t.grid[counts.missing_sums * t.width + counts.missing_diffs] += 1;
                    if counts.size > 0 {
                        let k = match Class::from_sizes(counts.sums, counts.diffs) {
                            Class::SumDominant => 0,
                            Class::Balanced => 1,
                            Class::DifferenceDominant => 2,
                        };
                        t.classes[k] += 1;
                    }
                }
                t
            })
            .reduce(EnumTally::default, |mut a, b| {
                a += b;
                a
            })
    })?;

    let mut counts = BTreeMap::new();
    for (i, &c) in tally.grid.iter().enumerate() {
        if c > 0 {
            counts.insert((i / width, i % width), c);
        }
    }
    Ok(JointHistogram {
        lattice_size: base.len(),
        potential_sums: ps,
        potential_diffs: pd,
        total,
        counts,
        mstd: tally.classes[0],
        balanced: tally.classes[1],
        diff_dominant: tally.classes[2],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub k: Point,
    pub mode: Mode,
    pub intersection: u64,
    pub empirical: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares the empirical probability that `k` is missing from `A + A`
/// (or `A - A`) against `(3/4)^(I/2 - l)`, where `I` counts the lattice points
/// of `nP ∩ (k - nP)` (or `nP ∩ (nP - k)`). The check passes when the
/// empirical rate is within three standard errors above the bound.
pub fn missing_prob_bound_check(
    p: &Polytope,
    n: i64,
    k: &Point,
    mode: Mode,
    l: u32,
    samples: u64,
    seed: u64,
) -> Result<BoundCheck> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let sampler = Sampler::new(p, n, None)?;
    let base = sampler.base();
    let intersection = intersection_count_in(p, n, base, k, mode);
    // index pairs whose joint presence forms k
    let pairs: Vec<(usize, usize)> = base
        .iter()
        .enumerate()
        .filter_map(|(i, x)| {
            let y = match mode {
                Mode::Sum => k - x,
                Mode::Diff => x + k,
            };
            let j = base.index_of(&y)?;
            (mode == Mode::Diff || i <= j).then_some((i, j))
        })
        .collect();

    let missing: Hits = sampler.run(samples, seed, rayon::current_num_threads(), |tally: &mut Hits, mask, _| {
        let has = |i: usize| mask[i / 64] >> (i % 64) & 1 == 1;
        if !pairs.iter().any(|&(i, j)| has(i) && has(j)) {
            tally.0 += 1;
        }
    })?;
    let empirical = missing.0 as f64 / samples as f64;
    let bound = 0.75f64.powf(intersection as f64 / 2.0 - l as f64);
    let b = bound.min(1.0);
    let se = (b * (1.0 - b) / samples as f64).sqrt();
    Ok(BoundCheck {
        k: k.clone(),
        mode,
        intersection,
        empirical,
        bound,
        holds: empirical <= bound + 3.0 * se,
    })
}

/// Grid bitmaps of the middle sums and differences: potential elements
/// farther than `r` from every vertex of `nP + nP` (resp. `nP - nP`).
#[derive(Clone, Debug)]
pub struct MiddleRegions {
    pub sums: Vec<u64>,
    pub diffs: Vec<u64>,
    pub sum_count: usize,
    pub diff_count: usize,
}

impl MiddleRegions {
    pub fn new(p: &Polytope, n: i64, r: Radius, kernel: &AdditiveKernel) -> Self {
        let sum_vertices: Vec<Point> = p.vertices().iter().map(|v| v.scale(2 * n)).collect();
        let mut diff_vertices = Vec::new();
        for (u, v) in sa_pairs(p) {
            let d = (p.vertex(u) - p.vertex(v)).scale(n);
            diff_vertices.push(-&d);
            diff_vertices.push(d);
        }
        let far = |x: &Point, corners: &[Point]| corners.iter().all(|c| !r.covers(x.dist_sq(c)));
        let mut sums = vec![0u64; kernel.words()];
        for i in BitIter::new(kernel.potential_sums()) {
            if far(&kernel.sum_point(i), &sum_vertices) {
                sums[i / 64] |= 1 << (i % 64);
            }
        }
        let mut diffs = vec![0u64; kernel.words()];
        for i in BitIter::new(kernel.potential_diffs()) {
            if far(&kernel.diff_point(i), &diff_vertices) {
                diffs[i / 64] |= 1 << (i % 64);
            }
        }
        MiddleRegions { sum_count: popcount(&sums), diff_count: popcount(&diffs), sums, diffs }
    }

    pub fn sums_present(&self, actual: &[u64]) -> bool {
        self.sums.iter().zip(actual).all(|(m, a)| m & !a == 0)
    }

    pub fn diffs_present(&self, actual: &[u64]) -> bool {
        self.diffs.iter().zip(actual).all(|(m, a)| m & !a == 0)
    }
}

/// Per-run statistics of sampling under a fringe.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FringeRunStats {
    pub trials: u64,
    pub middle_sums_present: u64,
    pub middle_diffs_present: u64,
    pub middle_both_present: u64,
    /// Samples whose missing counts equal the predicted `(s, 2d)` (or meet
    /// the lower bound on differences when only that is predicted).
    pub target_hits: u64,
    /// Samples with the whole middle present but missing counts off target.
    pub conditional_violations: u64,
}

impl AddAssign for FringeRunStats {
    fn add_assign(&mut self, rhs: Self) {
        self.trials += rhs.trials;
        self.middle_sums_present += rhs.middle_sums_present;
        self.middle_diffs_present += rhs.middle_diffs_present;
        self.middle_both_present += rhs.middle_both_present;
        self.target_hits += rhs.target_hits;
        self.conditional_violations += rhs.conditional_violations;
    }
}

/// Samples subsets extending `fringe` and records middle saturation and
/// whether the predicted missing counts are met.
pub fn fringe_run(
    p: &Polytope,
    fringe: &FringeAssignment,
    r: Radius,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<FringeRunStats> {
    let sampler = Sampler::new(p, fringe.n, Some(fringe))?;
    let middle = MiddleRegions::new(p, fringe.n, r, sampler.kernel());
    let (s, d2, exact) = (fringe.predicted_sums, fringe.predicted_diffs, fringe.diffs_exact);
    sampler.run(samples, seed, threads, |t: &mut FringeRunStats, mask, scratch| {
        let c = sampler.kernel.counts_for_mask(mask, scratch);
        let sums_ok = middle.sums_present(&scratch.sums);
        let diffs_ok = middle.diffs_present(&scratch.diffs);
        let on_target = c.missing_sums == s
            && if exact { c.missing_diffs == d2 } else { c.missing_diffs >= d2 };
        t.trials += 1;
        t.middle_sums_present += u64::from(sums_ok);
        t.middle_diffs_present += u64::from(diffs_ok);
        t.middle_both_present += u64::from(sums_ok && diffs_ok);
        t.target_hits += u64::from(on_target);
        t.conditional_violations += u64::from(sums_ok && diffs_ok && !on_target);
    })
}

/// Fraction of samples with every middle sum present, and with every middle
/// difference present.
pub fn middle_presence_rate(
    p: &Polytope,
    n: i64,
    r: Radius,
    fringe: &FringeAssignment,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if fringe.n != n {
        return Err(Error::IncompatibleFringe(format!("fringe built for n = {}, not {n}", fringe.n)));
    }
    let stats = fringe_run(p, fringe, r, samples, seed, rayon::current_num_threads())?;
    let t = stats.trials as f64;
    Ok((stats.middle_sums_present as f64 / t, stats.middle_diffs_present as f64 / t))
}
