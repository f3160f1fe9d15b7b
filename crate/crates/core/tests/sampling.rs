mod common;

use common::*;
use polylab_core::experiments::{
    exact_enumerate, fringe_run, rng_stream, sample_estimate, wilson_interval, Classifier, MiddleRegions,
    SampleConfig, Sampler,
};
use polylab_core::fringe::{assemble_fringe, FringeAssignment, FringeMode, Radius};
use polylab_core::lattice::enumerate_lattice;
use polylab_core::Polytope;
use proptest::prelude::*;

fn bit(mask: &[u64], i: usize) -> bool {
    mask[i / 64] >> (i % 64) & 1 == 1
}

#[test]
fn draws_respect_the_fringe() {
    let p = square();
    let fa = assemble_fringe(&p, 16, 1, 1, Radius::from_int(4), FringeMode::AntipodalEdges).unwrap();
    let sampler = Sampler::new(&p, 16, Some(&fa)).unwrap();
    let base = sampler.base();
    let mut mask = Vec::new();
    let mut seen_free_on = vec![false; base.len()];
    for trial in 0..200 {
        sampler.draw(9, trial, &mut mask);
        for x in fa.forced_present.iter() {
            assert!(bit(&mask, base.index_of(x).unwrap()));
        }
        for x in fa.forced_absent.iter() {
            assert!(!bit(&mask, base.index_of(x).unwrap()));
        }
        for x in fa.free.iter() {
            let i = base.index_of(x).unwrap();
            seen_free_on[i] |= bit(&mask, i);
        }
    }
    assert!(fa.free.iter().all(|x| seen_free_on[base.index_of(x).unwrap()]));
}

fn theorem1_conditional(p: &Polytope, n: i64, s: u32, d: u32) {
    let fa = assemble_fringe(p, n, s, d, Radius::from_int(4), FringeMode::AntipodalEdges).unwrap();
    let stats = fringe_run(p, &fa, fa.radius, 3000, 17, 4).unwrap();
    assert_eq!(stats.conditional_violations, 0, "{stats:?}");
    assert!(stats.middle_both_present > 0, "{stats:?}");
}

#[test]
fn theorem1_exact_whenever_middle_is_full() {
    for (s, d) in [(0, 0), (1, 0), (0, 1), (2, 1)] {
        theorem1_conditional(&square(), 16, s, d);
    }
    theorem1_conditional(&interval(), 40, 1, 1);
    theorem1_conditional(&hexagon(), 12, 1, 0);
}

fn theorem2_conditional(p: &Polytope, fa: &FringeAssignment) {
    let sampler = Sampler::new(p, fa.n, Some(fa)).unwrap();
    let middle = MiddleRegions::new(p, fa.n, fa.radius, sampler.kernel());
    let mut mask = Vec::new();
    let mut scratch = sampler.kernel().scratch();
    let mut checked = 0;
    for trial in 0..2000 {
        sampler.draw(23, trial, &mut mask);
        let c = sampler.kernel().counts_for_mask(&mask, &mut scratch);
        if middle.sums_present(scratch.sums()) {
            checked += 1;
            assert_eq!(c.missing_sums, fa.predicted_sums);
            assert!(c.missing_diffs >= fa.predicted_diffs);
        }
    }
    assert!(checked > 0);
}

#[test]
fn theorem2_exact_sums_whenever_middle_sums_are_full() {
    let t = triangle();
    for (s, d) in [(0, 1), (1, 1), (0, 2)] {
        let fa = assemble_fringe(&t, 30, s, d, Radius::from_int(4), FringeMode::EdgeGap).unwrap();
        assert_eq!(fa.gap_set.as_ref().map(|g| g.absent().len() as u32), Some(d));
        theorem2_conditional(&t, &fa);
    }
    let q = quadrilateral();
    let fa = assemble_fringe(&q, 6, 0, 1, Radius::from_int(3), FringeMode::EdgeGap).unwrap();
    theorem2_conditional(&q, &fa);
}

#[test]
fn estimates_agree_with_enumeration() {
    let cases: [(Polytope, i64); 4] = [(interval(), 12), (square(), 3), (triangle(), 3), (triangle(), 4)];
    for (p, n) in cases {
        let h = exact_enumerate(&p, n, 24).unwrap();
        for classifier in [Classifier::Mstd, Classifier::ExactSd { s: 0, d: 0 }, Classifier::Balanced] {
            let exact = h.proportion(classifier);
            let cfg = SampleConfig {
                polytope: p.clone(),
                n,
                samples: 40_000,
                seed: 5,
                fringe: None,
                classifier,
                threads: 4,
            };
            let est = sample_estimate(&cfg).unwrap();
            let sigma = (exact * (1.0 - exact) / 40_000.0).sqrt();
            assert!(
                (est.proportion - exact).abs() <= 3.0 * sigma + 1e-12,
                "{classifier:?} n = {n}: {} vs {exact}",
                est.proportion
            );
        }
    }
}

#[test]
fn histogram_totals() {
    for (p, n) in [(interval(), 9), (square(), 2), (triangle(), 2), (hexagon(), 1)] {
        let l = enumerate_lattice(&p, n).unwrap();
        if l.len() > 20 {
            continue;
        }
        let h = exact_enumerate(&p, n, 24).unwrap();
        assert_eq!(h.counts.values().sum::<u64>(), h.total);
        assert_eq!(h.mstd + h.balanced + h.diff_dominant, h.total - 1);
        let full = h.counts.get(&(0, 0)).copied().unwrap_or(0);
        assert!(full >= 1);
    }
}

#[test]
fn streams_are_distinct() {
    let firsts: std::collections::BTreeSet<u64> = (0..1000).map(|i| rng_stream(77, i).next_u64()).collect();
    assert_eq!(firsts.len(), 1000);
}

proptest! {
    #[test]
    fn wilson_brackets_the_proportion(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let hits = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(hits, trials, 1.96);
        let p = hits as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }
}
