//! Dense matrices and vectors over [`Rat`], plus exact linear solving.
//!
//! Matrices are row-major with explicit dimensions. Products skip zero
//! entries, which matters a lot here: the network constructions produce
//! block-diagonal weights that are mostly zeros.

use alloc::vec;
use alloc::vec::Vec;

use crate::rat::Rat;
use crate::{Error, Result};

/// Dense column vector.
pub type Vector = Vec<Rat>;

/// Exact dot product. Lengths must agree.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc += &(x * y);
    }
    acc
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("matrix rows"));
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience for small integer matrices in constructions and tests.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| Rat::from_int(v)))
            .collect();
        Matrix {
            rows: rows.len(),
            cols: rows.first().map_or(0, |r| r.len()),
            data,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[Rat]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector product"));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product"));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cell = &mut out.data[i * other.cols + j];
                    *cell += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Stacks matrices vertically; all must share the column count.
    pub fn vstack(blocks: &[&Matrix]) -> Result<Matrix> {
        let cols = blocks.first().ok_or(Error::EmptyList)?.cols;
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch("vertical stack"));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Block-diagonal assembly of the given blocks, in order.
    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    if !b.get(i, j).is_zero() {
                        out.set(r0 + i, c0 + j, b.get(i, j).clone());
                    }
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Block-diagonal matrix with `block` repeated `times` times.
    pub fn block_repeat(block: &Matrix, times: usize) -> Matrix {
        let blocks: Vec<&Matrix> = core::iter::repeat_n(block, times).collect();
        Matrix::block_diag(&blocks)
    }
}

impl core::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Solves `A x = b` exactly for square `A` by rational Gaussian elimination
/// with partial pivoting (largest rational magnitude in the column).
/// Returns `SingularMatrix` when `A` has no unique solution.
pub fn solve_linear_system(a: &Matrix, b: &[Rat]) -> Result<Vector> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(Error::DimensionMismatch("linear solve"));
    }
    // Augmented working copy [A | b].
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .filter(|&r| !aug[r][col].is_zero())
            .max_by(|&r, &s| aug[r][col].abs().cmp(&aug[s][col].abs()))
            .ok_or(Error::SingularMatrix)?;
        aug.swap(col, pivot_row);
        let (upper, lower) = aug.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        let pivot = &pivot_row[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].div(pivot)?;
            for (dst, src) in row.iter_mut().zip(pivot_row).skip(col) {
                if !src.is_zero() {
                    *dst -= &(&factor * src);
                }
            }
        }
    }

    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = aug[i][n].clone();
        for j in i + 1..n {
            if aug[i][j].is_zero() || x[j].is_zero() {
                continue;
            }
            acc -= &(&aug[i][j] * &x[j]);
        }
        x[i] = acc.div(&aug[i][i])?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(3);
        let b = vec![rat(1, 1), rat(2, 1), rat(3, 1)];
        assert_eq!(solve_linear_system(&a, &b).unwrap(), b);
    }

    #[test]
    fn solve_scalar() {
        let a = Matrix::from_ints(&[&[2]]);
        let x = solve_linear_system(&a, &[rat(4, 1)]).unwrap();
        assert_eq!(x, vec![rat(2, 1)]);
    }

    #[test]
    fn solve_singular() {
        let a = Matrix::from_ints(&[&[1, 2], &[2, 4]]);
        let b = vec![rat(1, 1), rat(2, 1)];
        assert_eq!(solve_linear_system(&a, &b), Err(Error::SingularMatrix));
    }

    #[test]
    fn block_diag_and_stack_shapes() {
        let a = Matrix::from_ints(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_ints(&[&[5]]);
        let d = Matrix::block_diag(&[&a, &b]);
        assert_eq!((d.num_rows(), d.num_cols()), (3, 3));
        assert_eq!(d.get(2, 2), &rat(5, 1));
        assert_eq!(d.get(0, 2), &Rat::zero());
        let s = Matrix::vstack(&[&a, &Matrix::from_ints(&[&[9, 9]])]).unwrap();
        assert_eq!((s.num_rows(), s.num_cols()), (3, 2));
    }

    proptest! {
        // Back-substitution oracle: whenever elimination succeeds, the
        // returned x satisfies A x = b exactly.
        #[test]
        fn solve_back_substitution(entries in proptest::collection::vec((-9i64..=9, 1i64..=4), 16),
                                   rhs in proptest::collection::vec((-9i64..=9, 1i64..=4), 4)) {
            let rows: Vec<Vec<Rat>> = entries
                .chunks(4)
                .map(|ch| ch.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect();
            let a = Matrix::from_rows(rows).unwrap();
            let b: Vec<Rat> = rhs.into_iter().map(|(n, d)| rat(n, d)).collect();
            if let Ok(x) = solve_linear_system(&a, &b) {
                prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
            }
        }
    }
}
