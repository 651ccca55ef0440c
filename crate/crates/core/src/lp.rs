//! Exact two-phase simplex over arbitrary-precision rationals.
//!
//! Solves min c·x subject to Ax = b, x >= 0. Bland's rule is used for both
//! pivot choices, so the method terminates without cycling. Problems here are
//! tiny (tens of variables), so no effort is spent on revised-simplex
//! bookkeeping.

use num_traits::{One, Signed, Zero};

use crate::series::{Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rat>, value: Rat },
}

struct Tableau {
    /// Constraint rows, each of length ncols + 1 (last entry = rhs).
    rows: Vec<Vec<Rat>>,
    /// Reduced-cost row of length ncols + 1 (last entry = -objective).
    cost: Vec<Rat>,
    basis: Vec<usize>,
    /// Columns >= this index are phase-1 artificials.
    nreal: usize,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.rows[r][j].clone();
        for entry in self.rows[r].iter_mut() {
            *entry /= &piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (e, p) in row.iter_mut().zip(&pivot_row) {
                *e -= &f * p;
            }
        }
        if !self.cost[j].is_zero() {
            let f = self.cost[j].clone();
            for (e, p) in self.cost.iter_mut().zip(&pivot_row) {
                *e -= &f * p;
            }
        }
        self.basis[r] = j;
    }

    /// Runs simplex iterations until optimal or unbounded.
    /// `allow` limits which columns may enter the basis.
    fn optimize(&mut self, allow: impl Fn(usize) -> bool) -> bool {
        loop {
            // Bland: smallest-index column with negative reduced cost.
            let entering = (0..self.ncols)
                .find(|&j| allow(j) && self.cost[j].is_negative());
            let j = match entering {
                Some(j) => j,
                None => return true,
            };
            // Leaving: minimal ratio, ties broken by smallest basis index.
            let mut best: Option<(Rat, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[j];
                let replace = match &best {
                    None => true,
                    Some((r, bi)) => {
                        ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi])
                    }
                };
                if replace {
                    best = Some((ratio, i));
                }
            }
            match best {
                Some((_, r)) => self.pivot(r, j),
                None => return false, // unbounded in direction j
            }
        }
    }

    fn solution(&self, nvars: usize) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); nvars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < nvars {
                x[b] = self.rows[i][self.ncols].clone();
            }
        }
        x
    }
}

/// min c·x subject to Ax = b, x >= 0, all data exact rationals.
pub fn minimize(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    for row in a {
        assert_eq!(row.len(), n);
    }

    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rat> = Vec::with_capacity(ncols + 1);
        let flip = b[i].is_negative();
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    let mut cost = vec![Rat::zero(); ncols + 1];
    for j in n..ncols {
        cost[j] = Rat::one();
    }
    let mut t = Tableau { rows, cost, basis: (n..ncols).collect(), nreal: n, ncols };
    // Reduce cost row against the initial artificial basis.
    for i in 0..m {
        let row = t.rows[i].clone();
        for (e, p) in t.cost.iter_mut().zip(&row) {
            *e -= p;
        }
    }
    let finished = t.optimize(|_| true);
    debug_assert!(finished, "phase 1 is bounded below by 0");
    let phase1 = -t.cost[ncols].clone();
    if !phase1.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= t.nreal {
            if let Some(j) = (0..t.nreal).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            }
            // else: redundant row, harmless to keep.
        }
    }

    // Phase 2 with the real objective.
    t.cost = vec![Rat::zero(); ncols + 1];
    for j in 0..n {
        t.cost[j] = c[j].clone();
    }
    for i in 0..m {
        let bj = t.basis[i];
        if bj < n && !t.cost[bj].is_zero() {
            let f = t.cost[bj].clone();
            let row = t.rows[i].clone();
            for (e, p) in t.cost.iter_mut().zip(&row) {
                *e -= &f * p;
            }
        }
    }
    let nreal = t.nreal;
    if !t.optimize(|j| j < nreal) {
        return LpOutcome::Unbounded;
    }
    let x = t.solution(n);
    let value = -t.cost[ncols].clone();
    LpOutcome::Optimal { x, value }
}

/// Feasibility of {x >= 0 : Ax = b}; returns a feasible point if one exists.
pub fn feasible_point(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.first().map_or(0, |r| r.len());
    match minimize(&vec![Rat::zero(); n], a, b) {
        LpOutcome::Optimal { x, .. } => Some(x),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

pub fn rat(n: i64) -> Rat {
    Rat::from(Int::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
