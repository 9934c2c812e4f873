#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::Rng;
use settol::lp::{Constraint, LinearProgram, Relation};
use settol::mst::Graph;
use settol::value::int;
use settol::{ExtendedValue, Rational};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn seven_vertex_graph() -> Graph {
    Graph::from_text(&fixture("appendixE.txt")).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Brute {
    Infeasible,
    Unbounded,
    Optimal(Rational),
}

/// Unique solution of the square-or-tall system, if it has full column rank
/// and is consistent.
fn solve_exact(
    mut rows: Vec<Vec<Rational>>,
    mut rhs: Vec<Rational>,
    k: usize,
) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let Some(p) = (pivot_row..n).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        rhs[pivot_row] = &rhs[pivot_row] * &inv;
        for r in 0..n {
            if r != pivot_row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot = rows[pivot_row].clone();
                for (x, p) in rows[r].iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
                let delta = &f * &rhs[pivot_row];
                rhs[r] -= delta;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivots.len() < k {
        return None;
    }
    if rhs[pivot_row..].iter().any(|b| !b.is_zero()) {
        return None;
    }
    Some(rhs[..k].to_vec())
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Vertices of `{x >= 0 : eq rows hold, le rows hold}`.
fn vertices(
    eqs: &[(Vec<Rational>, Rational)],
    les: &[(Vec<Rational>, Rational)],
    k: usize,
) -> Vec<Vec<Rational>> {
    let mut ineq: Vec<(Vec<Rational>, Rational)> = les.to_vec();
    for i in 0..k {
        let mut row = vec![Rational::zero(); k];
        row[i] = -Rational::one();
        ineq.push((row, Rational::zero()));
    }
    let feasible = |x: &[Rational]| {
        let dot = |a: &[Rational]| a.iter().zip(x).map(|(p, q)| p * q).sum::<Rational>();
        eqs.iter().all(|(a, b)| dot(a) == *b) && ineq.iter().all(|(a, b)| dot(a) <= *b)
    };
    let mut found: Vec<Vec<Rational>> = Vec::new();
    for tight in subsets_up_to(ineq.len(), k) {
        let mut rows: Vec<Vec<Rational>> = eqs.iter().map(|(a, _)| a.clone()).collect();
        let mut rhs: Vec<Rational> = eqs.iter().map(|(_, b)| b.clone()).collect();
        for &t in &tight {
            rows.push(ineq[t].0.clone());
            rhs.push(ineq[t].1.clone());
        }
        if rows.len() < k {
            continue;
        }
        if let Some(x) = solve_exact(rows, rhs, k) {
            if feasible(&x) && !found.contains(&x) {
                found.push(x);
            }
        }
    }
    found
}

/// Brute-force optimum of `lp` from its vertices and the vertices of its
/// normalized recession cone.
pub fn brute_force(lp: &LinearProgram) -> Brute {
    let k = lp.num_vars();
    let split = |rel: Relation| -> Vec<(Vec<Rational>, Rational)> {
        lp.constraints()
            .iter()
            .filter(|c: &&Constraint| c.relation == rel)
            .map(|c| (c.coeffs.clone(), c.rhs.clone()))
            .collect()
    };
    let (eqs, les) = (split(Relation::Eq), split(Relation::Le));
    let points = vertices(&eqs, &les, k);
    if points.is_empty() {
        return Brute::Infeasible;
    }
    let objective =
        |x: &[Rational]| -> Rational { lp.objective().iter().zip(x).map(|(c, v)| c * v).sum() };

    let mut cone_eqs: Vec<(Vec<Rational>, Rational)> = eqs
        .iter()
        .map(|(a, _)| (a.clone(), Rational::zero()))
        .collect();
    cone_eqs.push((vec![Rational::one(); k], Rational::one()));
    let cone_les: Vec<(Vec<Rational>, Rational)> = les
        .iter()
        .map(|(a, _)| (a.clone(), Rational::zero()))
        .collect();
    if vertices(&cone_eqs, &cone_les, k)
        .iter()
        .any(|d| objective(d).is_positive())
    {
        return Brute::Unbounded;
    }
    Brute::Optimal(points.iter().map(|x| objective(x)).max().unwrap())
}

/// A small random LP. Some rows get an infinite right-hand side.
pub fn random_lp(rng: &mut impl Rng) -> (LinearProgram, usize) {
    let k = rng.gen_range(1..=4);
    let objective = (0..k).map(|_| int(rng.gen_range(-3..=4))).collect();
    let mut lp = LinearProgram::new(objective);
    let rows = rng.gen_range(0..=10);
    let mut infinite = 0;
    for _ in 0..rows {
        let coeffs: Vec<Rational> = (0..k).map(|_| int(rng.gen_range(-3..=3))).collect();
        let rhs = int(rng.gen_range(-2..=8));
        match rng.gen_range(0..10) {
            0 => lp.add_eq(coeffs, rhs).unwrap(),
            2 => {
                infinite += 1;
                lp.add_le(coeffs, ExtendedValue::Infinity).unwrap()
            }
            _ => lp.add_le(coeffs, ExtendedValue::Finite(rhs)).unwrap(),
        }
    }
    (lp, infinite)
}
