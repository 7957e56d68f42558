//! Two-phase simplex over exact rationals.
//!
//! Solves `min/max c.x subject to A x <= b` with `x` free. Free variables
//! are split as `x = u - v` with `u, v >= 0`, slacks turn rows into
//! equalities, and rows with negative right-hand sides get artificial
//! variables that phase one drives to zero. Pivoting uses Bland's rule
//! (lowest eligible index for both the entering column and tie-broken
//! leaving row), which guarantees termination on every input. Everything is
//! computed in [`Rat`], so optima and witness points are exact.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{Matrix, Vector};
use crate::rat::Rat;
use crate::{Error, Result};

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// Result of an LP solve. The witness point satisfies every constraint
/// exactly when the status is `Optimal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vector },
    Infeasible,
    Unbounded,
}

/// Solves `sense c.x  s.t.  a x <= b` over free `x`.
pub fn lp_solve(objective: &[Rat], a: &Matrix, b: &[Rat], sense: Sense) -> Result<LpOutcome> {
    lp_solve_counted(objective, a, b, sense).map(|(outcome, _)| outcome)
}

/// Like [`lp_solve`] but also reports the number of simplex pivots, which
/// the termination property tests assert against a budget.
pub fn lp_solve_counted(
    objective: &[Rat],
    a: &Matrix,
    b: &[Rat],
    sense: Sense,
) -> Result<(LpOutcome, u64)> {
    if objective.len() != a.num_cols() || b.len() != a.num_rows() {
        return Err(Error::DimensionMismatch("lp_solve"));
    }
    let minimize: Vec<Rat> = match sense {
        Sense::Min => objective.to_vec(),
        Sense::Max => objective.iter().map(|c| -c).collect(),
    };
    let mut tableau = Tableau::new(&minimize, a, b);
    let outcome = tableau.solve();
    let outcome = match (outcome, sense) {
        (LpOutcome::Optimal { value, point }, Sense::Max) => LpOutcome::Optimal {
            value: -value,
            point,
        },
        (other, _) => other,
    };
    Ok((outcome, tableau.pivots))
}

struct Tableau {
    // One Vec per constraint row; the last entry is the right-hand side.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    n: usize,       // original free variables
    num_cols: usize, // u, v, slacks (artificials live past this bound)
    cost: Vec<Rat>, // phase-two cost over the first num_cols columns
    pivots: u64,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(cost: &[Rat], a: &Matrix, b: &[Rat]) -> Self {
        let n = a.num_cols();
        let m = a.num_rows();
        let num_cols = 2 * n + m;

        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = vec![Rat::zero(); num_cols + 1];
            for j in 0..n {
                let v = a.get(i, j);
                if !v.is_zero() {
                    row[j] = v.clone();
                    row[n + j] = -v;
                }
            }
            row[2 * n + i] = Rat::one();
            row[num_cols] = b[i].clone();
            let flip = b[i].is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            flipped.push(flip);
            rows.push(row);
        }

        // Slack columns of unflipped rows start as the basis; flipped rows
        // need an artificial column each.
        let mut basis = Vec::with_capacity(m);
        let mut next_artificial = num_cols;
        for (i, &flip) in flipped.iter().enumerate() {
            if flip {
                basis.push(usize::MAX); // patched below
                next_artificial += 1;
            } else {
                basis.push(2 * n + i);
            }
        }
        let total_cols = next_artificial;
        if total_cols > num_cols {
            let mut art = num_cols;
            for (i, &flip) in flipped.iter().enumerate() {
                let rhs = rows[i].pop().expect("rhs");
                rows[i].resize(total_cols, Rat::zero());
                rows[i].push(rhs);
                if flip {
                    rows[i][art] = Rat::one();
                    basis[i] = art;
                    art += 1;
                }
            }
        }

        let mut full_cost = vec![Rat::zero(); num_cols];
        for j in 0..n {
            full_cost[j] = cost[j].clone();
            full_cost[n + j] = -&cost[j];
        }

        Tableau {
            rows,
            basis,
            n,
            num_cols,
            cost: full_cost,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(self.num_cols, |r| r.len() - 1)
    }

    fn solve(&mut self) -> LpOutcome {
        if self.width() > self.num_cols {
            // Phase one: minimize the sum of artificial variables.
            let width = self.width();
            let mut reduced = vec![Rat::zero(); width];
            for r in reduced[self.num_cols..].iter_mut() {
                *r = Rat::one();
            }
            let mut objective = Rat::zero();
            for (i, &bv) in self.basis.iter().enumerate() {
                if bv >= self.num_cols {
                    let rhs = self.rhs(i).clone();
                    objective += &rhs;
                    for (r, v) in reduced.iter_mut().zip(&self.rows[i]) {
                        *r -= v;
                    }
                }
            }
            match self.run(&mut reduced, &mut objective) {
                Step::Optimal => {}
                Step::Unbounded => unreachable!("phase one is bounded below by zero"),
            }
            if objective.is_positive() {
                return LpOutcome::Infeasible;
            }
            self.evict_artificials();
        }

        // Phase two over the real cost.
        let width = self.width();
        let mut reduced = self.cost.clone();
        reduced.resize(width, Rat::zero());
        let mut objective = Rat::zero();
        for (i, &bv) in self.basis.iter().enumerate() {
            let c = &self.cost[bv];
            if c.is_zero() {
                continue;
            }
            objective += &(c * self.rhs(i));
            let scaled: Vec<Rat> = self.rows[i][..width].iter().map(|v| c * v).collect();
            for (r, s) in reduced.iter_mut().zip(&scaled) {
                *r -= s;
            }
        }
        match self.run(&mut reduced, &mut objective) {
            Step::Optimal => LpOutcome::Optimal {
                value: objective,
                point: self.witness(),
            },
            Step::Unbounded => LpOutcome::Unbounded,
        }
    }

    fn rhs(&self, i: usize) -> &Rat {
        let w = self.rows[i].len();
        &self.rows[i][w - 1]
    }

    /// Bland-rule simplex loop over the current reduced-cost row.
    fn run(&mut self, reduced: &mut [Rat], objective: &mut Rat) -> Step {
        loop {
            let Some(enter) = reduced.iter().position(|d| d.is_negative()) else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let coeff = &self.rows[i][enter];
                if !coeff.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i).div(coeff).expect("positive pivot");
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*best_i])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((leave, _)) = leave else {
                return Step::Unbounded;
            };
            self.pivot(leave, enter, reduced, objective);
        }
    }

    fn pivot(&mut self, row: usize, col: usize, reduced: &mut [Rat], objective: &mut Rat) {
        self.pivots += 1;
        let inv = Rat::one().div(&self.rows[row][col]).expect("nonzero pivot");
        if inv != Rat::one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = self.rows[row].clone();
        let w = pivot_row.len();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for j in 0..w {
                if pivot_row[j].is_zero() {
                    continue;
                }
                let delta = &factor * &pivot_row[j];
                r[j] -= &delta;
            }
        }
        let dcol = reduced[col].clone();
        if !dcol.is_zero() {
            *objective += &(&dcol * &pivot_row[w - 1]);
            for j in 0..reduced.len() {
                if pivot_row[j].is_zero() {
                    continue;
                }
                let delta = &dcol * &pivot_row[j];
                reduced[j] -= &delta;
            }
        }
        self.basis[row] = col;
    }

    /// After a zero-objective phase one, pivot artificials out of the basis
    /// (their rows are degenerate) or drop rows made entirely redundant,
    /// then cut the artificial columns off.
    fn evict_artificials(&mut self) {
        let width = self.width();
        let mut drop_rows = Vec::new();
        for i in 0..self.rows.len() {
            if self.basis[i] < self.num_cols {
                continue;
            }
            let target = (0..self.num_cols).find(|&j| !self.rows[i][j].is_zero());
            match target {
                Some(col) => {
                    // Degenerate pivot: rhs of this row is zero, so the
                    // basic solution is unchanged.
                    let mut dummy_reduced = vec![Rat::zero(); width];
                    let mut dummy_obj = Rat::zero();
                    self.pivot(i, col, &mut dummy_reduced, &mut dummy_obj);
                }
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            self.rows.remove(i);
            self.basis.remove(i);
        }
        for row in self.rows.iter_mut() {
            let rhs = row.pop().expect("rhs");
            row.truncate(self.num_cols);
            row.push(rhs);
        }
    }

    /// Reads `x = u - v` off the basic solution.
    fn witness(&self) -> Vector {
        let mut x = vec![Rat::zero(); self.n];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.n {
                x[bv] += self.rhs(i);
            } else if bv < 2 * self.n {
                x[bv - self.n] -= self.rhs(i);
            }
        }
        x
    }
}
