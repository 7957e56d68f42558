//! Polyhedra in H-representation, affine maps, and the LP-backed geometric
//! queries the compiler needs: interior points, the dominance test, and
//! affinely independent sample points.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, Matrix, Vector};
use crate::lp::{lp_solve, LpOutcome, Sense};
use crate::rat::Rat;
use crate::{Error, Result};

/// `x -> gradient . x + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub gradient: Vector,
    pub offset: Rat,
}

impl AffineMap {
    pub fn new(gradient: Vector, offset: Rat) -> Self {
        AffineMap { gradient, offset }
    }

    /// Constant map on `R^n`.
    pub fn constant(dim: usize, offset: Rat) -> Self {
        AffineMap {
            gradient: vec![Rat::zero(); dim],
            offset,
        }
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.gradient, x) + &self.offset
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &AffineMap) -> AffineMap {
        debug_assert_eq!(self.dim(), other.dim());
        AffineMap {
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(a, b)| a - b)
                .collect(),
            offset: &self.offset - &other.offset,
        }
    }

    pub fn neg(&self) -> AffineMap {
        AffineMap {
            gradient: self.gradient.iter().map(|g| -g).collect(),
            offset: -&self.offset,
        }
    }
}

/// `{ x : a x <= b }`. Zero rows means all of `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub a: Matrix,
    pub b: Vector,
}

impl Polyhedron {
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        if a.num_rows() != b.len() {
            return Err(Error::DimensionMismatch("polyhedron"));
        }
        Ok(Polyhedron { a, b })
    }

    /// The whole space, as a constraint-free polyhedron.
    pub fn full_space(dim: usize) -> Self {
        Polyhedron {
            a: Matrix::zeros(0, dim),
            b: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.num_cols()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.num_rows()
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rat]) -> bool {
        (0..self.num_constraints()).all(|i| dot(self.a.row(i), x) <= self.b[i])
    }

    /// Stacks the constraints of two polyhedra over the same space.
    pub fn intersection(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("polyhedron intersection"));
        }
        let a = Matrix::vstack(&[&self.a, &other.a])?;
        let mut b = self.b.clone();
        b.extend_from_slice(&other.b);
        Ok(Polyhedron { a, b })
    }
}

/// A strictly interior point with a uniform slack: `a . center <= b - margin`
/// holds row-wise, `margin > 0` and capped at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorWitness {
    pub center: Vector,
    pub margin: Rat,
}

impl InteriorWitness {
    /// Checks the witness against the polyhedron it claims to certify.
    pub fn certifies(&self, p: &Polyhedron) -> bool {
        self.margin.is_positive()
            && self.center.len() == p.dim()
            && (0..p.num_constraints())
                .all(|i| dot(p.a.row(i), &self.center) + &self.margin <= p.b[i])
    }
}

/// Finds a strictly interior point by solving
/// `max t  s.t.  a x <= b - t 1, 0 <= t <= 1`.
///
/// The slack cap keeps the LP bounded on unbounded polyhedra; any positive
/// uniform slack certifies interiority, a maximal ball is not needed.
pub fn interior_point(p: &Polyhedron) -> Result<InteriorWitness> {
    let n = p.dim();
    let m = p.num_constraints();
    let mut rows = Vec::with_capacity(m + 2);
    let mut rhs = Vec::with_capacity(m + 2);
    for i in 0..m {
        let mut row = p.a.row(i).to_vec();
        row.push(Rat::one());
        rows.push(row);
        rhs.push(p.b[i].clone());
    }
    let mut cap = vec![Rat::zero(); n];
    cap.push(Rat::one());
    rows.push(cap.clone());
    rhs.push(Rat::one());
    let mut lower: Vector = vec![Rat::zero(); n];
    lower.push(-Rat::one());
    rows.push(lower);
    rhs.push(Rat::zero());

    let mut objective = vec![Rat::zero(); n];
    objective.push(Rat::one());
    let a = Matrix::from_rows(rows)?;
    match lp_solve(&objective, &a, &rhs, Sense::Max)? {
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => unreachable!("slack is capped at 1"),
        LpOutcome::Optimal { value, mut point } => {
            if !value.is_positive() {
                return Err(Error::EmptyInterior);
            }
            point.truncate(n);
            Ok(InteriorWitness {
                center: point,
                margin: value,
            })
        }
    }
}

/// Eq-style dominance: `f >= g` everywhere on `p`, decided by minimizing
/// `f - g` over `p`. A minimum of exactly zero counts as domination.
pub fn dominates(f: &AffineMap, g: &AffineMap, p: &Polyhedron) -> Result<bool> {
    if f.dim() != g.dim() || f.dim() != p.dim() {
        return Err(Error::DimensionMismatch("dominates"));
    }
    let diff = f.sub(g);
    match lp_solve(&diff.gradient, &p.a, &p.b, Sense::Min)? {
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => Ok(false),
        LpOutcome::Optimal { value, .. } => Ok(!(value + diff.offset).is_negative()),
    }
}

/// LP feasibility of the stacked constraint systems.
pub fn intersection_nonempty(p1: &Polyhedron, p2: &Polyhedron) -> Result<bool> {
    let stacked = p1.intersection(p2)?;
    let objective = vec![Rat::zero(); stacked.dim()];
    match lp_solve(&objective, &stacked.a, &stacked.b, Sense::Min)? {
        LpOutcome::Infeasible => Ok(false),
        _ => Ok(true),
    }
}

/// The center plus `center + eps e_i` for each coordinate, with
/// `eps = margin / (1 + max |a_ij|)`, which keeps every point inside the
/// polyhedron: moving by `eps` along a single axis changes each row value by
/// at most `eps * max |a_ij| < margin`.
pub fn affinely_independent_samples(w: &InteriorWitness, a: &Matrix) -> Vec<Vector> {
    let n = w.center.len();
    let eps = sample_step(&w.margin, a);
    let mut points = Vec::with_capacity(n + 1);
    points.push(w.center.clone());
    for i in 0..n {
        let mut p = w.center.clone();
        p[i] += &eps;
        points.push(p);
    }
    points
}

/// Step length used by [`affinely_independent_samples`].
pub fn sample_step(margin: &Rat, a: &Matrix) -> Rat {
    margin
        .div(&(Rat::one() + max_abs_entry(a)))
        .expect("denominator is at least 1")
}

pub(crate) fn max_abs_entry(a: &Matrix) -> Rat {
    let mut best = Rat::zero();
    for i in 0..a.num_rows() {
        for v in a.row(i) {
            let m = v.abs();
            if m > best {
                best = m;
            }
        }
    }
    best
}
