//! Deterministic, seeded instance generators: one-dimensional profiles
//! (optionally embedded in higher dimension) and max-min lattice instances
//! built over a random hyperplane arrangement.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arrangement::enumerate_cells;
use crate::compiler::{CpwlInstance, Piece};
use crate::geometry::{AffineMap, InteriorWitness, Polyhedron};
use crate::linalg::{Matrix, Vector};
use crate::rat::Rat;
use crate::{Error, Result};

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn int_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    debug_assert!(lo <= hi);
    let span = (hi - lo + 1) as u64;
    lo + (rng.next_u64() % span) as i64
}

/// A small random rational with numerator in [-8, 8] and denominator in
/// {1, 2, 3, 4}; keeps instance data (and so LP pivots) short.
pub(crate) fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(int_in(rng, -8, 8), int_in(rng, 1, 4))
}

/// Random 1D CPWL instance: `q - 1` strictly increasing breakpoints,
/// random slopes with adjacent slopes distinct, offsets chained so the
/// function is continuous. Pieces are the closed intervals between
/// breakpoints, unbounded at both ends; `q = 1` is a single affine piece.
pub fn gen_1d(q: usize, seed: u64) -> CpwlInstance {
    gen_1d_in_dim(q, 1, seed)
}

/// The 1D profile embedded in `R^dim`: breakpoints run along the first
/// coordinate and the gradient entries for the remaining coordinates are
/// drawn once and shared by every piece, which preserves continuity across
/// the breakpoint hyperplanes.
pub fn gen_1d_in_dim(q: usize, dim: usize, seed: u64) -> CpwlInstance {
    assert!(q >= 1 && dim >= 1, "gen_1d_in_dim needs q >= 1, dim >= 1");
    let mut rng = rng_from_seed(seed);

    let shared_tail: Vector = (0..dim - 1).map(|_| small_rat(&mut rng)).collect();
    let mut slopes: Vec<Rat> = Vec::with_capacity(q);
    for i in 0..q {
        loop {
            let s = small_rat(&mut rng);
            if i == 0 || s != slopes[i - 1] {
                slopes.push(s);
                break;
            }
        }
    }

    let mut breaks: Vec<Rat> = Vec::with_capacity(q.saturating_sub(1));
    if q > 1 {
        let mut t = Rat::new(int_in(&mut rng, -8, 8), 2);
        breaks.push(t.clone());
        for _ in 2..q {
            t = &t + &Rat::new(int_in(&mut rng, 1, 8), 4);
            breaks.push(t.clone());
        }
    }

    let mut offsets: Vec<Rat> = Vec::with_capacity(q);
    offsets.push(small_rat(&mut rng));
    for i in 1..q {
        let step = &(&slopes[i - 1] - &slopes[i]) * &breaks[i - 1];
        let prev = offsets[i - 1].clone();
        offsets.push(prev + step);
    }

    let axis_row = |sign: i64| -> Vector {
        let mut row = vec![Rat::zero(); dim];
        row[0] = Rat::from_int(sign);
        row
    };
    let center_at = |x0: Rat| -> Vector {
        let mut c = vec![Rat::zero(); dim];
        c[0] = x0;
        c
    };

    let mut pieces = Vec::with_capacity(q);
    for i in 0..q {
        let (rows, rhs, witness): (Vec<Vector>, Vec<Rat>, InteriorWitness) = if q == 1 {
            (
                Vec::new(),
                Vec::new(),
                InteriorWitness {
                    center: center_at(Rat::zero()),
                    margin: Rat::one(),
                },
            )
        } else if i == 0 {
            let w = InteriorWitness {
                center: center_at(&breaks[0] - &Rat::one()),
                margin: Rat::one(),
            };
            (vec![axis_row(1)], vec![breaks[0].clone()], w)
        } else if i == q - 1 {
            let w = InteriorWitness {
                center: center_at(&breaks[q - 2] + &Rat::one()),
                margin: Rat::one(),
            };
            (vec![axis_row(-1)], vec![-&breaks[q - 2]], w)
        } else {
            let lo = &breaks[i - 1];
            let hi = &breaks[i];
            let mid = (lo + hi).div(&Rat::from_int(2)).expect("2 != 0");
            let half = (hi - lo).div(&Rat::from_int(2)).expect("2 != 0");
            let w = InteriorWitness {
                center: center_at(mid),
                margin: half.min(Rat::one()),
            };
            (
                vec![axis_row(-1), axis_row(1)],
                vec![-lo, hi.clone()],
                w,
            )
        };
        let mat = if rows.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(rows).expect("aligned rows")
        };
        let mut gradient = vec![slopes[i].clone()];
        gradient.extend(shared_tail.iter().cloned());
        pieces.push(Piece {
            region: Polyhedron::new(mat, rhs).expect("aligned rhs"),
            map: AffineMap::new(gradient, offsets[i].clone()),
            interior: Some(witness),
        });
    }

    CpwlInstance::new(dim, pieces).expect("generator produces consistent dimensions")
}

/// A max-of-mins expression over component indices.
pub type LatticeExpression = Vec<Vec<usize>>;

/// Random max-min instance on `R^dim` (`dim <= 3`): draws `k` distinct
/// affine maps, cuts space along their pairwise difference hyperplanes, and
/// makes every full-dimensional cell a piece carrying the value of a random
/// max-of-mins expression over the maps.
pub fn gen_maxmin(dim: usize, k: usize, seed: u64) -> Result<CpwlInstance> {
    assert!(k >= 1, "gen_maxmin needs k >= 1");
    let mut rng = rng_from_seed(seed);

    let mut maps: Vec<AffineMap> = Vec::with_capacity(k);
    while maps.len() < k {
        let gradient: Vector = (0..dim).map(|_| small_rat(&mut rng)).collect();
        let candidate = AffineMap::new(gradient, small_rat(&mut rng));
        if !maps.contains(&candidate) {
            maps.push(candidate);
        }
    }

    let mut expression: LatticeExpression = Vec::with_capacity(k);
    for j in 0..k {
        let mut term = vec![j];
        for i in 0..k {
            if i != j && rng.next_u64().is_multiple_of(2) {
                term.push(i);
            }
        }
        term.sort_unstable();
        expression.push(term);
    }

    maxmin_instance(&maps, &expression, dim)
}

/// Builds the piecewise form of `max_j min_{i in expression[j]} maps[i]`.
///
/// The arrangement is rebuilt over the components the expression actually
/// realizes, so the emitted instance always satisfies
/// `k <= q <= phi(dim, k)` for its own discovered component count.
pub fn maxmin_instance(
    maps: &[AffineMap],
    expression: &LatticeExpression,
    dim: usize,
) -> Result<CpwlInstance> {
    if maps.is_empty() || expression.is_empty() {
        return Err(Error::EmptyList);
    }
    if expression
        .iter()
        .any(|t| t.is_empty() || t.iter().any(|&i| i >= maps.len()))
    {
        return Err(Error::InvalidArgs("expression indexes missing maps"));
    }

    // First pass: which components does the expression realize on the full
    // difference arrangement?
    let cells = enumerate_cells(&difference_hyperplanes(maps), dim)?;
    let mut realized: Vec<usize> = Vec::new();
    for cell in &cells {
        let idx = selected_component(maps, expression, &cell.point, None)?;
        if !realized.contains(&idx) {
            realized.push(idx);
        }
    }
    realized.sort_unstable();

    // Second pass over the realized components only; on these cells the
    // expression is affine even where dropped components change order.
    let survivors: Vec<AffineMap> = realized.iter().map(|&i| maps[i].clone()).collect();
    let cells = if realized.len() == maps.len() {
        cells
    } else {
        enumerate_cells(&difference_hyperplanes(&survivors), dim)?
    };

    let mut pieces = Vec::with_capacity(cells.len());
    for cell in cells {
        let idx = selected_component(maps, expression, &cell.point, Some(&realized))?;
        pieces.push(Piece {
            region: cell.region.clone(),
            map: maps[idx].clone(),
            interior: Some(cell.witness()),
        });
    }
    CpwlInstance::new(dim, pieces)
}

fn difference_hyperplanes(maps: &[AffineMap]) -> Vec<AffineMap> {
    let mut hyperplanes = Vec::new();
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            let diff = maps[i].sub(&maps[j]);
            // Parallel distinct maps never meet: no hyperplane.
            if diff.gradient.iter().any(|g| !g.is_zero()) {
                hyperplanes.push(diff);
            }
        }
    }
    hyperplanes
}

/// Evaluates the expression at `x` and returns the index of the component
/// whose value it equals, searched within `within` when given. The caller
/// guarantees `x` is off every relevant difference hyperplane, which makes
/// the match unique.
fn selected_component(
    maps: &[AffineMap],
    expression: &LatticeExpression,
    x: &[Rat],
    within: Option<&[usize]>,
) -> Result<usize> {
    let value = expression
        .iter()
        .map(|term| {
            term.iter()
                .map(|&i| maps[i].eval(x))
                .min()
                .expect("terms are nonempty")
        })
        .max()
        .expect("expression is nonempty");
    let candidates: Vec<usize> = match within {
        Some(set) => set.to_vec(),
        None => (0..maps.len()).collect(),
    };
    let matching: Vec<usize> = candidates
        .into_iter()
        .filter(|&i| maps[i].eval(x) == value)
        .collect();
    match matching.as_slice() {
        [unique] => Ok(*unique),
        _ => Err(Error::InvalidArgs(
            "expression value ambiguous at a cell representative",
        )),
    }
}
