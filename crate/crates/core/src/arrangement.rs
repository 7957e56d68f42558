//! Full-dimensional cell enumeration for hyperplane arrangements at desk
//! scale (input dimension at most 3).
//!
//! Cells are found by depth-first search over sign vectors. Strictness is
//! handled by a slack LP: a partial sign assignment survives iff some point
//! satisfies every signed constraint with a common positive margin (capped
//! at 1, as in the interior-point LP), so branches that could only produce
//! lower-dimensional faces are pruned immediately.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{AffineMap, InteriorWitness, Polyhedron};
use crate::linalg::{Matrix, Vector};
use crate::lp::{lp_solve, LpOutcome, Sense};
use crate::rat::Rat;
use crate::{Error, Result};

/// One open full-dimensional cell of an arrangement, with a strict interior
/// point and the closed polyhedron spanned by its sign vector.
#[derive(Clone, Debug)]
pub struct ArrangementCell {
    /// `+1`/`-1` per hyperplane: the sign of `h(x)` throughout the cell.
    pub signs: Vec<i8>,
    pub point: Vector,
    pub margin: Rat,
    pub region: Polyhedron,
}

impl ArrangementCell {
    pub fn witness(&self) -> InteriorWitness {
        InteriorWitness {
            center: self.point.clone(),
            margin: self.margin.clone(),
        }
    }
}

/// Enumerates every full-dimensional cell of the arrangement of the zero
/// sets of the given affine maps.
pub fn enumerate_cells(hyperplanes: &[AffineMap], dim: usize) -> Result<Vec<ArrangementCell>> {
    if dim == 0 || dim > 3 {
        return Err(Error::DimensionTooLarge(dim));
    }
    for h in hyperplanes {
        if h.dim() != dim {
            return Err(Error::DimensionMismatch("hyperplane dimensions"));
        }
        if h.gradient.iter().all(Rat::is_zero) {
            return Err(Error::InvalidArgs("hyperplane with zero gradient"));
        }
    }

    let mut cells = Vec::new();
    let mut signs: Vec<i8> = Vec::with_capacity(hyperplanes.len());
    let mut rows_a: Vec<Vector> = Vec::with_capacity(hyperplanes.len());
    let mut rows_b: Vec<Rat> = Vec::with_capacity(hyperplanes.len());
    let root = strict_witness(&rows_a, &rows_b, dim)?.expect("empty arrangement has one cell");
    search(
        hyperplanes,
        dim,
        &mut signs,
        &mut rows_a,
        &mut rows_b,
        root,
        &mut cells,
    )?;
    Ok(cells)
}

fn search(
    hyperplanes: &[AffineMap],
    dim: usize,
    signs: &mut Vec<i8>,
    rows_a: &mut Vec<Vector>,
    rows_b: &mut Vec<Rat>,
    witness: (Vector, Rat),
    cells: &mut Vec<ArrangementCell>,
) -> Result<()> {
    let idx = signs.len();
    if idx == hyperplanes.len() {
        let mat = if rows_a.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(rows_a.clone())?
        };
        let region = Polyhedron::new(mat, rows_b.clone())?;
        cells.push(ArrangementCell {
            signs: signs.clone(),
            point: witness.0,
            margin: witness.1,
            region,
        });
        return Ok(());
    }
    let h = &hyperplanes[idx];
    for sign in [1i8, -1] {
        // sign * h(x) >= 0, as a row of the closed polyhedron.
        let s = Rat::from_int(sign as i64);
        let row: Vector = h.gradient.iter().map(|g| -(&s * g)).collect();
        let rhs = &s * &h.offset;
        rows_a.push(row);
        rows_b.push(rhs);
        signs.push(sign);
        if let Some(w) = strict_witness(rows_a, rows_b, dim)? {
            search(hyperplanes, dim, signs, rows_a, rows_b, w, cells)?;
        }
        signs.pop();
        rows_a.pop();
        rows_b.pop();
    }
    Ok(())
}

/// Maximizes a shared slack over the accumulated rows; `Some` iff the open
/// cell is nonempty (slack strictly positive).
fn strict_witness(
    rows_a: &[Vector],
    rows_b: &[Rat],
    dim: usize,
) -> Result<Option<(Vector, Rat)>> {
    let mut rows: Vec<Vector> = Vec::with_capacity(rows_a.len() + 2);
    let mut rhs: Vec<Rat> = Vec::with_capacity(rows_b.len() + 2);
    for (a, b) in rows_a.iter().zip(rows_b) {
        let mut row = a.clone();
        row.push(Rat::one());
        rows.push(row);
        rhs.push(b.clone());
    }
    let mut cap = vec![Rat::zero(); dim];
    cap.push(Rat::one());
    rows.push(cap);
    rhs.push(Rat::one());
    let mut lower = vec![Rat::zero(); dim];
    lower.push(-Rat::one());
    rows.push(lower);
    rhs.push(Rat::zero());

    let mut objective = vec![Rat::zero(); dim];
    objective.push(Rat::one());
    match lp_solve(&objective, &Matrix::from_rows(rows)?, &rhs, Sense::Max)? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("slack is capped at 1"),
        LpOutcome::Optimal { value, mut point } => {
            if value.is_positive() {
                point.truncate(dim);
                Ok(Some((point, value)))
            } else {
                Ok(None)
            }
        }
    }
}
