#![allow(dead_code)]

use polylab_core::lp::{int, lp_feasible, Constraint, Relation};
use polylab_core::{Point, Polytope};

pub fn poly(dim: usize, vs: &[&[i64]]) -> Polytope {
    Polytope::new(dim, vs.iter().map(|v| Point(v.to_vec())).collect()).unwrap()
}

pub fn interval() -> Polytope {
    poly(1, &[&[0], &[1]])
}

pub fn square() -> Polytope {
    poly(2, &[&[0, 0], &[1, 0], &[1, 1], &[0, 1]])
}

pub fn triangle() -> Polytope {
    poly(2, &[&[0, 0], &[1, 0], &[0, 1]])
}

pub fn hexagon() -> Polytope {
    poly(2, &[&[0, 0], &[4, 0], &[6, 4], &[2, 8], &[1, 8], &[-2, 2]])
}

pub fn quadrilateral() -> Polytope {
    poly(2, &[&[0, 0], &[5, 4], &[7, 2], &[5, -1]])
}

pub fn tetrahedron() -> Polytope {
    poly(3, &[&[-1, 0, 0], &[1, 0, 0], &[0, -1, 1], &[0, 1, 1]])
}

pub fn cube() -> Polytope {
    let mut vs = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                vs.push(Point(vec![x, y, z]));
            }
        }
    }
    Polytope::new(3, vs).unwrap()
}

/// Is `x` a convex combination of `points`? Solved as an LP in the weights.
pub fn in_hull(points: &[Point], x: &[i64]) -> bool {
    let m = points.len();
    let mut cs = Vec::new();
    for k in 0..x.len() {
        let coeffs = points.iter().map(|p| int(p.0[k])).collect();
        cs.push(Constraint::new(coeffs, Relation::Eq, int(x[k])));
    }
    cs.push(Constraint::new(vec![int(1); m], Relation::Eq, int(1)));
    for i in 0..m {
        let mut e = vec![int(0); m];
        e[i] = int(1);
        cs.push(Constraint::new(e, Relation::Ge, int(0)));
    }
    lp_feasible(m, &cs)
}

/// The extreme points of a point cloud, in input order.
pub fn extreme_points(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let others: Vec<Point> = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
        if others.is_empty() || !in_hull(&others, &p.0) {
            out.push(p.clone());
        }
    }
    out
}

/// Polytope spanned by `points`, or `None` if it is not full-dimensional.
pub fn hull(dim: usize, points: &[Point]) -> Option<Polytope> {
    Polytope::new(dim, extreme_points(points)).ok()
}
