//! Face structure and antipodality predicates for integer-vertex polytopes.
//!
//! Every predicate that asks for a supporting hyperplane with a strict
//! inequality is rewritten with a unit slack (`≤ -1` / `≥ +1`); the systems are
//! homogeneous in the direction `c`, so this loses nothing and turns each
//! question into an exact feasibility problem for [`crate::lp`].

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{int, LinearSystem, Relation};
use crate::point::Point;

/// Supporting hyperplane of a facet: the polytope lies in `normal·x ≤ offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    edges: Vec<(usize, usize)>,
}

impl Polytope {
    /// Validates a V-representation and derives facets and edges.
    pub fn new(dim: usize, vertices: Vec<Point>) -> Result<Self> {
        validate_polytope(dim, vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Edges as vertex-index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Membership of `p` in the dilation `nP`.
    pub fn contains_dilated(&self, p: &[i64], n: i64) -> bool {
        self.facets.iter().all(|f| {
            let lhs: i64 = f.normal.iter().zip(p).map(|(a, b)| a * b).sum();
            lhs <= n * f.offset
        })
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.contains_dilated(p, 1)
    }

    /// Per-coordinate (min, max) over the vertices.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = self.vertices[0].0.clone();
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            for (k, &c) in v.0.iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        (lo, hi)
    }

    /// Edges incident to vertex `v`, as indices into [`Polytope::edges`].
    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, &(a, b))| a == v || b == v)
            .map(|(i, _)| i)
    }

    /// Index of the edge joining `a` and `b`, if any.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key)
    }
}

/// Builds a [`Polytope`] from its vertices, checking that the input is a
/// full-dimensional V-representation without redundant points.
pub fn validate_polytope(dim: usize, vertices: Vec<Point>) -> Result<Polytope> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if let Some((i, v)) = vertices.iter().enumerate().find(|(_, v)| v.dim() != dim) {
        return Err(Error::InvalidInput(format!(
            "vertex {i} has {} coordinates, expected {dim}",
            v.dim()
        )));
    }
    if vertices.len() < dim + 1 {
        let affine_dim = affine_rank(&vertices);
        return Err(Error::NotFullDimensional { dim, affine_dim });
    }
    let affine_dim = affine_rank(&vertices);
    if affine_dim < dim {
        return Err(Error::NotFullDimensional { dim, affine_dim });
    }
    for i in 0..vertices.len() {
        if !is_extreme(&vertices, i) {
            return Err(Error::RedundantVertex { index: i, coords: vertices[i].0.clone() });
        }
    }
    let facets = enumerate_facets(dim, &vertices);
    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            if is_edge(&vertices, a, b) {
                edges.push((a, b));
            }
        }
    }
    Ok(Polytope { dim, vertices, facets, edges })
}

/// Dimension of the affine hull.
fn affine_rank(points: &[Point]) -> usize {
    let Some(first) = points.first() else { return 0 };
    let rows: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|p| (p - first).0.iter().map(|&c| int(c)).collect())
        .collect();
    rank(rows)
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for j in c..cols {
                    let t = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - t;
                }
            }
        }
        r += 1;
    }
    r
}

/// `vertices[i]` is the unique maximizer of some linear functional.
fn is_extreme(vertices: &[Point], i: usize) -> bool {
    let dim = vertices[i].dim();
    let mut sys = LinearSystem::new(dim);
    for (j, x) in vertices.iter().enumerate() {
        if j != i {
            sys.push_ints(&(x - &vertices[i]).0, Relation::Le, -1);
        }
    }
    sys.is_feasible()
}

/// Some hyperplane touches the hull exactly in segment `ab`.
fn is_edge(vertices: &[Point], a: usize, b: usize) -> bool {
    let dim = vertices[a].dim();
    let mut sys = LinearSystem::new(dim);
    sys.push_ints(&(&vertices[a] - &vertices[b]).0, Relation::Eq, 0);
    for (j, x) in vertices.iter().enumerate() {
        if j != a && j != b {
            sys.push_ints(&(x - &vertices[a]).0, Relation::Le, -1);
        }
    }
    sys.is_feasible()
}

fn enumerate_facets(dim: usize, vertices: &[Point]) -> Vec<Facet> {
    let mut found = BTreeSet::new();
    for subset in combinations(vertices.len(), dim) {
        let base = &vertices[subset[0]];
        let diffs: Vec<Vec<i64>> = subset[1..].iter().map(|&i| (&vertices[i] - base).0).collect();
        let normal = normal_vector(dim, &diffs);
        if normal.iter().all(|&c| c == 0) {
            continue;
        }
        let normal = Point(normal).primitive().0;
        let offset = base.dot(&normal);
        let mut above = false;
        let mut below = false;
        for v in vertices {
            let val = v.dot(&normal);
            above |= val > offset;
            below |= val < offset;
        }
        match (above, below) {
            (true, true) => continue,
            (false, _) => {
                found.insert(Facet { normal, offset });
            }
            (true, false) => {
                found.insert(Facet { normal: normal.iter().map(|c| -c).collect(), offset: -offset });
            }
        }
    }
    found.into_iter().collect()
}

/// Generalized cross product of `dim - 1` vectors in `Z^dim`.
fn normal_vector(dim: usize, rows: &[Vec<i64>]) -> Vec<i64> {
    debug_assert_eq!(rows.len() + 1, dim);
    (0..dim)
        .map(|col| {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, &x)| x as i128)
                        .collect()
                })
                .collect();
            let sign = if col % 2 == 0 { 1 } else { -1 };
            (sign * det(minor)) as i64
        })
        .collect()
}

/// Integer determinant by fraction-free (Bareiss) elimination.
fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else { return 0 };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// Vertices `u` and `v` admit parallel supporting hyperplanes meeting the
/// polytope only in `u` and only in `v` respectively.
pub fn strictly_antipodal(p: &Polytope, u: usize, v: usize) -> bool {
    assert!(u != v, "strictly_antipodal needs distinct vertices");
    let (pu, pv) = (p.vertex(u), p.vertex(v));
    let mut sys = LinearSystem::new(p.dim());
    for (j, x) in p.vertices().iter().enumerate() {
        if j != u {
            sys.push_ints(&(x - pu).0, Relation::Le, -1);
        }
        if j != v {
            sys.push_ints(&(x - pv).0, Relation::Ge, 1);
        }
    }
    sys.is_feasible()
}

/// All strictly antipodal vertex pairs `(u, v)`, `u < v`.
pub fn sa_pairs(p: &Polytope) -> Vec<(usize, usize)> {
    let m = p.num_vertices();
    let mut out = Vec::new();
    for u in 0..m {
        for v in u + 1..m {
            if strictly_antipodal(p, u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Primitive edge directions leaving vertex `v`, lexicographically sorted.
pub fn supporting_cone_dirs(p: &Polytope, v: usize) -> Vec<Point> {
    let mut dirs: Vec<Point> = p
        .incident_edges(v)
        .map(|e| {
            let (a, b) = p.edges()[e];
            let other = if a == v { b } else { a };
            (p.vertex(other) - p.vertex(v)).primitive()
        })
        .collect();
    dirs.sort();
    dirs.dedup();
    dirs
}

/// Number of unordered pairs of edges with parallel directions. For a polygon
/// this is the number of parallel side pairs.
pub fn parallel_edge_pairs(p: &Polytope) -> usize {
    let dirs: Vec<Point> = p
        .edges()
        .iter()
        .map(|&(a, b)| canonical_line_dir(&(p.vertex(b) - p.vertex(a))))
        .collect();
    let mut count = 0;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            if dirs[i] == dirs[j] {
                count += 1;
            }
        }
    }
    count
}

/// Primitive direction with the first nonzero coordinate positive.
fn canonical_line_dir(d: &Point) -> Point {
    let d = d.primitive();
    match d.0.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => -&d,
        _ => d,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LpsCertificate {
    /// A vertex with two or more strictly antipodal partners.
    MultiplePartners { vertex: usize, partners: Vec<usize> },
    /// A matched pair whose supporting cones are not negatives of each other.
    ConeMismatch { u: usize, v: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpsVerdict {
    pub lps: bool,
    pub pairing: Option<Vec<(usize, usize)>>,
    pub certificate: Option<LpsCertificate>,
}

/// Local point symmetry, decided two ways: directly (perfect matching of
/// antipodal pairs with negated cones) and by counting antipodal pairs
/// against `m / 2`. Disagreement is reported as an internal inconsistency.
pub fn is_locally_point_symmetric(p: &Polytope) -> Result<LpsVerdict> {
    let pairs = sa_pairs(p);
    lps_from_pairs(p, &pairs)
}

fn lps_from_pairs(p: &Polytope, pairs: &[(usize, usize)]) -> Result<LpsVerdict> {
    let m = p.num_vertices();
    let mut partners = vec![Vec::new(); m];
    for &(u, v) in pairs {
        partners[u].push(v);
        partners[v].push(u);
    }

    let verdict = if let Some(vertex) = (0..m).find(|&v| partners[v].len() >= 2) {
        LpsVerdict {
            lps: false,
            pairing: None,
            certificate: Some(LpsCertificate::MultiplePartners {
                vertex,
                partners: partners[vertex].clone(),
            }),
        }
    } else if let Some(vertex) = (0..m).find(|&v| partners[v].is_empty()) {
        // Every vertex of a polytope has at least one antipodal partner.
        return Err(Error::InternalInconsistency(format!(
            "vertex {vertex} has no strictly antipodal partner"
        )));
    } else {
        let mismatch = pairs.iter().find(|&&(u, v)| {
            let cu = supporting_cone_dirs(p, u);
            let mut cv: Vec<Point> = supporting_cone_dirs(p, v).iter().map(|d| -d).collect();
            cv.sort();
            cu != cv
        });
        match mismatch {
            Some(&(u, v)) => LpsVerdict {
                lps: false,
                pairing: None,
                certificate: Some(LpsCertificate::ConeMismatch { u, v }),
            },
            None => LpsVerdict { lps: true, pairing: Some(pairs.to_vec()), certificate: None },
        }
    };

    let count_says = m.is_multiple_of(2) && pairs.len() == m / 2;
    if count_says != verdict.lps {
        return Err(Error::InternalInconsistency(format!(
            "cone criterion says lps = {}, pair count {} vs m/2 = {} says {}",
            verdict.lps,
            pairs.len(),
            m as f64 / 2.0,
            count_says
        )));
    }
    Ok(verdict)
}

/// Parallel supporting hyperplanes, one touching only vertex `v`, the other
/// touching exactly edge `edge`.
pub fn vertex_edge_antipodal(p: &Polytope, v: usize, edge: usize) -> bool {
    let (a, b) = p.edges()[edge];
    if v == a || v == b {
        return false;
    }
    let (pa, pb, pv) = (p.vertex(a), p.vertex(b), p.vertex(v));
    let mut sys = LinearSystem::new(p.dim());
    sys.push_ints(&(pa - pb).0, Relation::Eq, 0);
    for (j, x) in p.vertices().iter().enumerate() {
        if j != a && j != b {
            sys.push_ints(&(pa - x).0, Relation::Ge, 1);
        }
        if j != v {
            sys.push_ints(&(x - pv).0, Relation::Ge, 1);
        }
    }
    sys.is_feasible()
}

/// Searches `(vertex, edge)` pairs in lexicographic order for a vertex and an
/// edge on parallel supporting hyperplanes. Differences between the vertex and
/// points of the edge are then uniquely formed in every dilation.
pub fn find_unique_diff_edge(p: &Polytope) -> Result<Option<(usize, usize)>> {
    let lps = is_locally_point_symmetric(p)?;
    find_unique_diff_edge_with(p, lps.lps)
}

fn find_unique_diff_edge_with(p: &Polytope, lps: bool) -> Result<Option<(usize, usize)>> {
    for v in 0..p.num_vertices() {
        for e in 0..p.edges().len() {
            if vertex_edge_antipodal(p, v, e) {
                return Ok(Some((v, e)));
            }
        }
    }
    if !lps {
        return Err(Error::InternalInconsistency(
            "polytope is not locally point symmetric but no vertex/edge witness exists".into(),
        ));
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryReport {
    pub sa_pairs: Vec<(usize, usize)>,
    pub lps: bool,
    pub lps_pairing: Option<Vec<(usize, usize)>>,
    pub lps_certificate: Option<LpsCertificate>,
    pub unique_diff_witness: Option<(usize, usize)>,
}

pub fn geometry_report(p: &Polytope) -> Result<GeometryReport> {
    let pairs = sa_pairs(p);
    let verdict = lps_from_pairs(p, &pairs)?;
    let witness = find_unique_diff_edge_with(p, verdict.lps)?;
    Ok(GeometryReport {
        sa_pairs: pairs,
        lps: verdict.lps,
        lps_pairing: verdict.pairing,
        lps_certificate: verdict.certificate,
        unique_diff_witness: witness,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn poly(dim: usize, vs: &[&[i64]]) -> Polytope {
        Polytope::new(dim, vs.iter().map(|v| Point(v.to_vec())).collect()).unwrap()
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

    #[test]
    fn square_structure() {
        let s = square();
        assert_eq!(s.facets().len(), 4);
        assert_eq!(s.edges().len(), 4);
        assert!(s.contains(&[1, 1]));
        assert!(!s.contains(&[2, 0]));
    }

    #[test]
    fn triangle_structure() {
        let t = triangle();
        assert_eq!(t.facets().len(), 3);
        assert_eq!(t.edges().len(), 3);
    }

    #[test]
    fn interior_point_is_redundant() {
        let err = Polytope::new(
            2,
            [[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]].iter().map(|v| Point(v.to_vec())).collect(),
        )
        .unwrap_err();
        assert_eq!(err, Error::RedundantVertex { index: 4, coords: vec![1, 1] });
    }

    #[test]
    fn duplicate_vertex_is_redundant() {
        let err = Polytope::new(
            2,
            [[0, 0], [1, 0], [0, 1], [0, 0]].iter().map(|v| Point(v.to_vec())).collect(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::RedundantVertex { index: 0, .. }));
    }

    #[test]
    fn collinear_input_rejected() {
        let err = Polytope::new(
            2,
            [[0, 0], [1, 1], [3, 3]].iter().map(|v| Point(v.to_vec())).collect(),
        )
        .unwrap_err();
        assert_eq!(err, Error::NotFullDimensional { dim: 2, affine_dim: 1 });
        let err = Polytope::new(2, vec![Point(vec![0, 0]), Point(vec![1, 0])]).unwrap_err();
        assert!(matches!(err, Error::NotFullDimensional { .. }));
    }

    #[test]
    fn segment_structure() {
        let seg = poly(1, &[&[0], &[3]]);
        assert_eq!(seg.facets().len(), 2);
        assert_eq!(seg.edges(), &[(0, 1)]);
        assert_eq!(supporting_cone_dirs(&seg, 0), vec![Point(vec![1])]);
        assert!(is_locally_point_symmetric(&seg).unwrap().lps);
        assert_eq!(find_unique_diff_edge(&seg).unwrap(), None);
    }

    #[test]
    fn square_antipodality() {
        let s = square();
        assert!(strictly_antipodal(&s, 0, 2));
        assert!(!strictly_antipodal(&s, 0, 1));
        assert_eq!(sa_pairs(&s), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn triangle_all_pairs_antipodal() {
        let t = triangle();
        assert!(strictly_antipodal(&t, 0, 1));
        assert!(strictly_antipodal(&t, 1, 2));
        assert!(strictly_antipodal(&t, 0, 2));
        assert_eq!(sa_pairs(&t).len(), 3);
    }

    #[test]
    fn hexagon_pairs_and_parallel_sides() {
        let h = hexagon();
        assert_eq!(h.edges().len(), 6);
        assert_eq!(parallel_edge_pairs(&h), 3);
        assert_eq!(sa_pairs(&h), vec![(0, 3), (1, 4), (2, 5)]);
    }

    #[test]
    fn cone_directions() {
        assert_eq!(
            supporting_cone_dirs(&square(), 0),
            vec![Point(vec![0, 1]), Point(vec![1, 0])]
        );
        assert_eq!(
            supporting_cone_dirs(&triangle(), 1),
            vec![Point(vec![-1, 0]), Point(vec![-1, 1])]
        );
    }

    #[test]
    fn lps_verdicts() {
        let sq = is_locally_point_symmetric(&square()).unwrap();
        assert!(sq.lps);
        assert_eq!(sq.pairing, Some(vec![(0, 2), (1, 3)]));

        let tri = is_locally_point_symmetric(&triangle()).unwrap();
        assert!(!tri.lps);
        assert!(matches!(tri.certificate, Some(LpsCertificate::MultiplePartners { .. })));

        assert!(is_locally_point_symmetric(&hexagon()).unwrap().lps);
        assert!(!is_locally_point_symmetric(&tetrahedron()).unwrap().lps);
        assert!(!is_locally_point_symmetric(&quadrilateral()).unwrap().lps);
    }

    #[test]
    fn unique_diff_witnesses() {
        let t = triangle();
        let (v, e) = find_unique_diff_edge(&t).unwrap().unwrap();
        let (a, b) = t.edges()[e];
        assert!(v != a && v != b);

        assert_eq!(find_unique_diff_edge(&square()).unwrap(), None);
        assert_eq!(find_unique_diff_edge(&hexagon()).unwrap(), None);
        assert!(find_unique_diff_edge(&quadrilateral()).unwrap().is_some());
        assert!(find_unique_diff_edge(&tetrahedron()).unwrap().is_some());
    }

    #[test]
    fn specific_triangle_witness_certified() {
        // (0,1) against the edge (0,0)-(1,0), certified by c = (0,-1).
        let t = triangle();
        let e = t.edge_index(0, 1).unwrap();
        assert!(vertex_edge_antipodal(&t, 2, e));
    }

    #[test]
    fn tetrahedron_structure() {
        let t = tetrahedron();
        assert_eq!(t.facets().len(), 4);
        assert_eq!(t.edges().len(), 6);
        assert_eq!(sa_pairs(&t).len(), 6);
    }

    #[test]
    fn cube_is_point_symmetric() {
        let mut vs = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    vs.push(Point(vec![x, y, z]));
                }
            }
        }
        let cube = Polytope::new(3, vs).unwrap();
        assert_eq!(cube.facets().len(), 6);
        assert_eq!(cube.edges().len(), 12);
        let v = is_locally_point_symmetric(&cube).unwrap();
        assert!(v.lps);
        assert_eq!(v.pairing.unwrap().len(), 4);
    }

    #[test]
    fn determinant_and_combinations() {
        assert_eq!(det(vec![vec![2, 0], vec![0, 3]]), 6);
        assert_eq!(det(vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
