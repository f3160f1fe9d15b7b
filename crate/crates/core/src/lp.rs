//! Exact feasibility of small rational linear systems.
//!
//! Equalities are removed by substitution, the remaining inequalities by
//! Fourier–Motzkin elimination. Everything is done over arbitrary precision
//! rationals, so the answer never depends on a tolerance. The intended scale is
//! a few dozen constraints over at most ~16 unknowns.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact rational number. Always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `a·c ≤ b`
    Le,
    /// `a·c = b`
    Eq,
    /// `a·c ≥ b`
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    /// Convenience constructor from integer data.
    pub fn from_ints(coeffs: &[i64], relation: Relation, rhs: i64) -> Self {
        Constraint {
            coeffs: coeffs.iter().map(|&a| int(a)).collect(),
            relation,
            rhs: int(rhs),
        }
    }
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Linear system over `num_vars` unknowns.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        assert_eq!(c.coeffs.len(), self.num_vars, "constraint arity mismatch");
        self.constraints.push(c);
    }

    pub fn push_ints(&mut self, coeffs: &[i64], relation: Relation, rhs: i64) {
        self.push(Constraint::from_ints(coeffs, relation, rhs));
    }

    pub fn is_feasible(&self) -> bool {
        lp_feasible(self.num_vars, &self.constraints)
    }
}

/// `a·x ≤ b`, the only form used during elimination.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    a: Vec<Rational>,
    b: Rational,
}

impl Ineq {
    /// Scale so the first nonzero coefficient has absolute value 1.
    fn normalized(mut self) -> Ineq {
        if let Some(lead) = self.a.iter().find(|x| !x.is_zero()).cloned() {
            let s = lead.abs();
            for x in &mut self.a {
                *x = &*x / &s;
            }
            self.b = &self.b / &s;
        }
        self
    }
}

/// Decides whether the system has a rational solution.
pub fn lp_feasible(num_vars: usize, constraints: &[Constraint]) -> bool {
    let mut eqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut ineqs: Vec<Ineq> = Vec::new();
    for c in constraints {
        debug_assert_eq!(c.coeffs.len(), num_vars);
        match c.relation {
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Le => ineqs.push(Ineq { a: c.coeffs.clone(), b: c.rhs.clone() }),
            Relation::Ge => ineqs.push(Ineq {
                a: c.coeffs.iter().map(|x| -x).collect(),
                b: -c.rhs.clone(),
            }),
        }
    }

    // Gaussian elimination on the equalities, substituting each pivot into
    // every other row.
    let mut used = vec![false; num_vars];
    let mut i = 0;
    while i < eqs.len() {
        let pivot = (0..num_vars).find(|&j| !eqs[i].0[j].is_zero());
        let Some(p) = pivot else {
            if !eqs[i].1.is_zero() {
                return false;
            }
            eqs.swap_remove(i);
            continue;
        };
        used[p] = true;
        let (row, rhs) = eqs.swap_remove(i);
        let inv = row[p].recip();
        let row: Vec<Rational> = row.iter().map(|x| x * &inv).collect();
        let rhs = rhs * &inv;
        // x_p = rhs - sum_{j != p} row[j] x_j
        for (other, orhs) in eqs.iter_mut() {
            let f = other[p].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..num_vars {
                other[j] = &other[j] - &f * &row[j];
            }
            *orhs = &*orhs - &f * &rhs;
        }
        for q in ineqs.iter_mut() {
            let f = q.a[p].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..num_vars {
                q.a[j] = &q.a[j] - &f * &row[j];
            }
            q.b = &q.b - &f * &rhs;
        }
        i = 0;
    }

    let remaining: Vec<usize> = (0..num_vars).filter(|&j| !used[j]).collect();
    fourier_motzkin(ineqs, &remaining)
}

fn fourier_motzkin(ineqs: Vec<Ineq>, vars: &[usize]) -> bool {
    let mut set: BTreeSet<Ineq> = ineqs.into_iter().map(Ineq::normalized).collect();
    let mut vars: Vec<usize> = vars.to_vec();

    loop {
        // Constant rows are decided immediately.
        let mut keep = BTreeSet::new();
        for q in set {
            if q.a.iter().all(|x| x.is_zero()) {
                if q.b.is_negative() {
                    return false;
                }
            } else {
                keep.insert(q);
            }
        }
        set = keep;
        if set.is_empty() {
            return true;
        }
        vars.retain(|&v| set.iter().any(|q| !q.a[v].is_zero()));
        if vars.is_empty() {
            return true;
        }

        // Eliminate the variable that produces the fewest new rows.
        let &var = vars
            .iter()
            .min_by_key(|&&v| {
                let pos = set.iter().filter(|q| q.a[v].is_positive()).count();
                let neg = set.iter().filter(|q| q.a[v].is_negative()).count();
                pos * neg
            })
            .expect("nonempty");

        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = BTreeSet::new();
        for q in set {
            if q.a[var].is_positive() {
                pos.push(q);
            } else if q.a[var].is_negative() {
                neg.push(q);
            } else {
                next.insert(q);
            }
        }
        for p in &pos {
            for n in &neg {
                // p.a[var] > 0, n.a[var] < 0: combine with positive weights.
                let wp = -n.a[var].clone();
                let wn = p.a[var].clone();
                let a: Vec<Rational> = p
                    .a
                    .iter()
                    .zip(&n.a)
                    .map(|(x, y)| x * &wp + y * &wn)
                    .collect();
                let b = &p.b * &wp + &n.b * &wn;
                let mut q = Ineq { a, b };
                q.a[var] = Rational::zero();
                next.insert(q.normalized());
            }
        }
        vars.retain(|&v| v != var);
        set = next;
    }
}
