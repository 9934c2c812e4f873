//! Exact-rational linear programs.
//!
//! Every program here has the shape
//!
//! ```text
//! maximize    c·x
//! subject to  a_r·x = b_r   or   a_r·x <= b_r    for each row r
//!             x >= 0
//! ```
//!
//! and is solved with a two-phase simplex method on a condensed (dictionary)
//! tableau using Bland's smallest-index rule, so every pivot decision is an
//! exact comparison and the method cannot cycle. The problems built by the
//! tolerance engine have at most a handful of variables but up to `2^k` rows,
//! which suits a tableau whose width is the number of nonbasic variables.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::value::{format_rational, ExtendedValue, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// A maximization problem over nonnegative variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    dropped: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
            dropped: 0,
        }
    }

    /// `maximize x_1 + ... + x_k`.
    pub fn maximize_sum(num_vars: usize) -> Self {
        LinearProgram::new(vec![Rational::one(); num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Rows discarded because their right-hand side was `+inf`.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Adds a row. A row whose right-hand side is infinite can never bind
    /// and is discarded.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: ExtendedValue,
    ) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::invalid(format!(
                "constraint has {} coefficients, program has {} variables",
                coeffs.len(),
                self.num_vars()
            )));
        }
        match rhs {
            ExtendedValue::Infinity => self.dropped += 1,
            ExtendedValue::Finite(rhs) => self.constraints.push(Constraint {
                coeffs,
                relation,
                rhs,
            }),
        }
        Ok(())
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: ExtendedValue) -> Result<()> {
        self.add_constraint(coeffs, Relation::Le, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<()> {
        self.add_constraint(coeffs, Relation::Eq, ExtendedValue::Finite(rhs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal objective value, `+inf` when unbounded.
    pub value: ExtendedValue,
    /// An optimal vertex, present iff the status is `Optimal`.
    pub witness: Option<Vec<Rational>>,
}

/// True iff `alpha` satisfies every retained row exactly.
pub fn check_feasible(lp: &LinearProgram, alpha: &[Rational]) -> Result<bool> {
    if alpha.len() != lp.num_vars() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, program has {} variables",
            alpha.len(),
            lp.num_vars()
        )));
    }
    if alpha.iter().any(Signed::is_negative) {
        return Ok(false);
    }
    Ok(lp.constraints.iter().all(|c| {
        let lhs: Rational = c.coeffs.iter().zip(alpha).map(|(a, x)| a * x).sum();
        match c.relation {
            Relation::Eq => lhs == c.rhs,
            Relation::Le => lhs <= c.rhs,
        }
    }))
}

/// Solves `lp` exactly.
///
/// Fails with [`Error::Infeasible`] when no point satisfies the rows.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    Tableau::solve(lp, None)
}

/// Like [`solve_lp`], appending a plain-text dump of every tableau to `trace`.
pub fn solve_lp_traced(lp: &LinearProgram, trace: &mut String) -> Result<LpOutcome> {
    Tableau::solve(lp, Some(trace))
}

/// Variable ids: `0..k` structural, `k..k+r` slack/surplus of row `r`,
/// `k+r..k+2r` artificial of row `r`.
struct Tableau<'t> {
    k: usize,
    rows: usize,
    /// `x_basic[r] + Σ_j t[r][j] · x_nonbasic[j] = rhs[r]`
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// `z = z0 + Σ_j d[j] · x_nonbasic[j]`
    d: Vec<Rational>,
    z0: Rational,
    trace: Option<&'t mut String>,
    pivots: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<'t> Tableau<'t> {
    fn solve(lp: &LinearProgram, trace: Option<&'t mut String>) -> Result<LpOutcome> {
        let k = lp.num_vars();
        let rows = lp.constraints.len();
        let mut tab = Tableau {
            k,
            rows,
            basic: Vec::with_capacity(rows),
            nonbasic: (0..k).collect(),
            t: Vec::with_capacity(rows),
            rhs: Vec::with_capacity(rows),
            d: Vec::new(),
            z0: Rational::zero(),
            trace,
            pivots: 0,
        };

        // Surplus columns for `<=` rows whose rhs is negative (they become
        // `>=` rows after negation).
        let surplus_rows: Vec<usize> = lp
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.relation == Relation::Le && c.rhs.is_negative())
            .map(|(r, _)| r)
            .collect();
        tab.nonbasic.extend(surplus_rows.iter().map(|&r| k + r));
        let width = tab.nonbasic.len();

        let mut artificial_rows = Vec::new();
        for (r, c) in lp.constraints.iter().enumerate() {
            let negate = c.rhs.is_negative();
            let mut row: Vec<Rational> = c
                .coeffs
                .iter()
                .map(|a| if negate { -a } else { a.clone() })
                .collect();
            row.resize(width, Rational::zero());
            let b = if negate { -&c.rhs } else { c.rhs.clone() };
            match (c.relation, negate) {
                (Relation::Le, false) => tab.basic.push(k + r),
                (Relation::Le, true) => {
                    let col = k + surplus_rows.iter().position(|&s| s == r).unwrap();
                    row[col] = -Rational::one();
                    tab.basic.push(k + rows + r);
                    artificial_rows.push(r);
                }
                (Relation::Eq, _) => {
                    tab.basic.push(k + rows + r);
                    artificial_rows.push(r);
                }
            }
            tab.t.push(row);
            tab.rhs.push(b);
        }

        if !artificial_rows.is_empty() {
            // Phase one: maximize -Σ artificials.
            tab.d = vec![Rational::zero(); width];
            for &r in &artificial_rows {
                for (dj, a) in tab.d.iter_mut().zip(&tab.t[r]) {
                    *dj += a;
                }
                tab.z0 -= &tab.rhs[r];
            }
            tab.dump("phase 1 start");
            match tab.run()? {
                Phase::Optimal => {}
                Phase::Unbounded => {
                    return Err(Error::internal(
                        "phase one objective is bounded above by zero",
                    ))
                }
            }
            if tab.z0.is_negative() {
                return Err(Error::Infeasible);
            }
            tab.expel_artificials();
        }

        // Phase two objective in terms of the current nonbasic variables.
        let cost = |id: usize| -> Rational {
            if id < k {
                lp.objective[id].clone()
            } else {
                Rational::zero()
            }
        };
        tab.d = tab.nonbasic.iter().map(|&id| cost(id)).collect();
        tab.z0 = Rational::zero();
        for r in 0..tab.basic.len() {
            let cb = cost(tab.basic[r]);
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in tab.d.iter_mut().zip(&tab.t[r]) {
                *dj -= &cb * a;
            }
            tab.z0 += &cb * &tab.rhs[r];
        }
        tab.dump("phase 2 start");

        match tab.run()? {
            Phase::Unbounded => Ok(LpOutcome {
                status: LpStatus::Unbounded,
                value: ExtendedValue::Infinity,
                witness: None,
            }),
            Phase::Optimal => {
                let mut x = vec![Rational::zero(); k];
                for (r, &id) in tab.basic.iter().enumerate() {
                    if id < k {
                        x[id] = tab.rhs[r].clone();
                    }
                }
                Ok(LpOutcome {
                    status: LpStatus::Optimal,
                    value: ExtendedValue::Finite(tab.z0.clone()),
                    witness: Some(x),
                })
            }
        }
    }

    fn is_artificial(&self, id: usize) -> bool {
        id >= self.k + self.rows
    }

    /// Simplex iterations with Bland's rule until optimal or unbounded.
    fn run(&mut self) -> Result<Phase> {
        loop {
            let entering = self
                .d
                .iter()
                .enumerate()
                .filter(|(_, dj)| dj.is_positive())
                .map(|(j, _)| j)
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(col) = entering else {
                return Ok(Phase::Optimal);
            };

            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.basic.len() {
                let a = &self.t[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leaving {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basic[r] < self.basic[*best_r])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(Phase::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        let inv = p.recip();
        for (j, a) in self.t[row].iter_mut().enumerate() {
            if j == col {
                *a = inv.clone();
            } else if !a.is_zero() {
                *a *= &inv;
            }
        }
        self.rhs[row] *= &inv;

        let pivot_row = self.t[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.basic.len() {
            if r == row || self.t[r][col].is_zero() {
                continue;
            }
            let f = self.t[r][col].clone();
            for (j, pr) in pivot_row.iter().enumerate() {
                if j == col {
                    self.t[r][j] = -(&f * &inv);
                } else if !pr.is_zero() {
                    self.t[r][j] -= &f * pr;
                }
            }
            self.rhs[r] -= &f * &pivot_rhs;
        }

        let g = self.d[col].clone();
        if !g.is_zero() {
            for (j, pr) in pivot_row.iter().enumerate() {
                if j == col {
                    self.d[j] = -(&g * &inv);
                } else if !pr.is_zero() {
                    self.d[j] -= &g * pr;
                }
            }
            self.z0 += &g * &pivot_rhs;
        }

        std::mem::swap(&mut self.basic[row], &mut self.nonbasic[col]);
        self.pivots += 1;
        if self.trace.is_some() {
            let title = format!("after pivot {}", self.pivots);
            self.dump(&title);
        }
    }

    /// After a feasible phase one, pivots zero-level artificials out of the
    /// basis, deletes rows that turn out redundant, and removes artificial
    /// columns.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.basic.len() {
            if !self.is_artificial(self.basic[r]) {
                r += 1;
                continue;
            }
            let replacement = (0..self.nonbasic.len())
                .filter(|&j| !self.is_artificial(self.nonbasic[j]) && !self.t[r][j].is_zero())
                .min_by_key(|&j| self.nonbasic[j]);
            match replacement {
                Some(col) => {
                    self.pivot(r, col);
                    r += 1;
                }
                None => {
                    self.basic.remove(r);
                    self.t.remove(r);
                    self.rhs.remove(r);
                }
            }
        }
        let keep: Vec<usize> = (0..self.nonbasic.len())
            .filter(|&j| !self.is_artificial(self.nonbasic[j]))
            .collect();
        self.nonbasic = keep.iter().map(|&j| self.nonbasic[j]).collect();
        for row in &mut self.t {
            *row = keep.iter().map(|&j| row[j].clone()).collect();
        }
        self.d = keep.iter().map(|&j| self.d[j].clone()).collect();
    }

    fn name(&self, id: usize) -> String {
        if id < self.k {
            format!("x{}", id + 1)
        } else if id < self.k + self.rows {
            format!("s{}", id - self.k + 1)
        } else {
            format!("a{}", id - self.k - self.rows + 1)
        }
    }

    fn dump(&mut self, title: &str) {
        if self.trace.is_none() {
            return;
        }
        let mut out = String::new();
        let _ = writeln!(out, "-- {title}");
        let header: Vec<String> = self.nonbasic.iter().map(|&id| self.name(id)).collect();
        let _ = writeln!(out, "basis | rhs | {}", header.join(" "));
        for r in 0..self.basic.len() {
            let cells: Vec<String> = self.t[r].iter().map(format_rational).collect();
            let _ = writeln!(
                out,
                "{} | {} | {}",
                self.name(self.basic[r]),
                format_rational(&self.rhs[r]),
                cells.join(" ")
            );
        }
        let cells: Vec<String> = self.d.iter().map(format_rational).collect();
        let _ = writeln!(
            out,
            "z | {} | {}",
            format_rational(&self.z0),
            cells.join(" ")
        );
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push_str(&out);
        }
    }
}
