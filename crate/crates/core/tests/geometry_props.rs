mod common;

use common::*;
use polylab_core::geometry::{
    find_unique_diff_edge, geometry_report, is_locally_point_symmetric, parallel_edge_pairs, sa_pairs,
};
use polylab_core::lattice::{edge_map, enumerate_lattice, uniquely_formed_diffs, LatticeSet};
use polylab_core::{Point, Polytope};
use proptest::prelude::*;

fn point_cloud(dim: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, dim).prop_map(Point), len)
}

fn corpus() -> Vec<(&'static str, Polytope)> {
    vec![
        ("interval", interval()),
        ("square", square()),
        ("triangle", triangle()),
        ("hexagon", hexagon()),
        ("quadrilateral", quadrilateral()),
        ("tetrahedron", tetrahedron()),
        ("cube", cube()),
    ]
}

#[test]
fn facet_membership_matches_hull_lp() {
    let mut state = 0x5eed_u64;
    let mut next = |lo: i64, hi: i64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        lo + ((state >> 33) as i64).rem_euclid(hi - lo + 1)
    };
    for (name, p) in corpus() {
        let (lo, hi) = p.bounding_box();
        for _ in 0..1000 {
            let x: Vec<i64> = lo.iter().zip(&hi).map(|(&a, &b)| next(a - 1, b + 1)).collect();
            assert_eq!(p.contains(&x), in_hull(p.vertices(), &x), "{name} at {x:?}");
        }
    }
}

#[test]
fn corpus_counts_and_verdicts() {
    let expect = [
        ("square", 2, true),
        ("triangle", 3, false),
        ("hexagon", 3, true),
        ("quadrilateral", 4, false),
        ("tetrahedron", 6, false),
        ("cube", 4, true),
    ];
    let corpus = corpus();
    for (name, pairs, lps) in expect {
        let p = &corpus.iter().find(|(n, _)| *n == name).unwrap().1;
        let r = geometry_report(p).unwrap();
        assert_eq!(r.sa_pairs.len(), pairs, "{name}");
        assert_eq!(r.lps, lps, "{name}");
        assert_eq!(r.lps_pairing.is_some(), lps, "{name}");
        assert_eq!(r.unique_diff_witness.is_some(), !lps, "{name}");
    }
}

/// Every `e - v` with `e` on the witness edge has one ordered representation.
fn witness_differences_unique(p: &Polytope, n: i64) {
    let (v, e) = find_unique_diff_edge(p).unwrap().expect("non-LPS polytope has a witness");
    let lattice = enumerate_lattice(p, n).unwrap();
    let vn = p.vertex(v).scale(n);
    let (a, _) = p.edges()[e];
    let map = edge_map(p, e, n, a).unwrap();
    for x in map.points() {
        let k = &x - &vn;
        let reps = lattice.iter().filter(|y| lattice.contains(&(*y - &k))).count();
        assert_eq!(reps, 1, "{k} at n = {n}");
    }
}

#[test]
fn witness_differences_unique_on_corpus() {
    for p in [triangle(), quadrilateral(), tetrahedron()] {
        for n in 1..=3 {
            witness_differences_unique(&p, n);
        }
    }
}

#[test]
fn lps_unique_differences_are_the_antipodal_vertex_differences() {
    for p in [square(), hexagon(), cube()] {
        let pairs = sa_pairs(&p);
        for n in 1..=3 {
            let expected = LatticeSet::from_points(
                p.dim(),
                pairs.iter().flat_map(|&(u, v)| {
                    let d = (p.vertex(u) - p.vertex(v)).scale(n);
                    [-&d, d]
                }),
            );
            let got = uniquely_formed_diffs(&enumerate_lattice(&p, n).unwrap());
            assert_eq!(got, expected, "n = {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polygon_pair_count(cloud in point_cloud(2, 3..9)) {
        let Some(p) = hull(2, &cloud) else { return Ok(()) };
        let m = p.num_vertices();
        let pairs = sa_pairs(&p).len();
        prop_assert_eq!(pairs, m - parallel_edge_pairs(&p));
        prop_assert!(pairs >= m.div_ceil(2));
        let verdict = is_locally_point_symmetric(&p).unwrap();
        prop_assert_eq!(verdict.lps, 2 * pairs == m);
    }

    #[test]
    fn polytope_pair_lower_bound(cloud in point_cloud(3, 4..9)) {
        let Some(p) = hull(3, &cloud) else { return Ok(()) };
        let m = p.num_vertices();
        prop_assert!(sa_pairs(&p).len() >= m.div_ceil(2));
        let r = geometry_report(&p).unwrap();
        if !r.lps {
            prop_assert!(r.unique_diff_witness.is_some());
        }
    }

    #[test]
    fn point_symmetric_is_lps(cloud in point_cloud(2, 2..6), shift in prop::collection::vec(-3i64..=3, 2)) {
        let mut pts = cloud.clone();
        for x in &cloud {
            pts.push(Point(vec![shift[0] - x.0[0], shift[1] - x.0[1]]));
        }
        let Some(p) = hull(2, &pts) else { return Ok(()) };
        prop_assert!(is_locally_point_symmetric(&p).unwrap().lps);
    }

    #[test]
    fn point_symmetric_is_lps_3d(cloud in point_cloud(3, 3..6)) {
        let mut pts = cloud.clone();
        pts.extend(cloud.iter().map(|x| -x));
        let Some(p) = hull(3, &pts) else { return Ok(()) };
        prop_assert!(is_locally_point_symmetric(&p).unwrap().lps);
    }

    #[test]
    fn witness_on_random_non_lps_polygons(cloud in point_cloud(2, 3..7)) {
        let Some(p) = hull(2, &cloud) else { return Ok(()) };
        if !is_locally_point_symmetric(&p).unwrap().lps {
            witness_differences_unique(&p, 1);
            witness_differences_unique(&p, 2);
        }
    }
}
