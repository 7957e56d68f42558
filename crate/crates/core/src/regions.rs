//! Exact linear-region extraction from small scalar-valued networks.
//!
//! Activation patterns are explored depth first, one ReLU at a time. Fixing
//! a neuron on or off adds one linear inequality over the input space;
//! branches are kept only while a slack LP certifies a full-dimensional
//! region, so the result is exactly the set of maximal linear regions, each
//! with its affine map and a strict interior point.

use alloc::vec;
use alloc::vec::Vec;

use crate::compiler::{CpwlInstance, Piece};
use crate::geometry::{AffineMap, InteriorWitness, Polyhedron};
use crate::linalg::{Matrix, Vector};
use crate::lp::{lp_solve, LpOutcome, Sense};
use crate::rat::Rat;
use crate::relunet::{Layer, ReluNetwork};
use crate::{Error, Result};

/// Refuse exhaustive pattern search beyond this many ReLUs.
pub const MAX_RELUS: usize = 20;

/// Decomposes a scalar-output network into pieces, one per feasible
/// activation pattern with nonempty interior. The union of the pieces
/// covers the input space and the network is affine on each.
pub fn regions_from_network(net: &ReluNetwork) -> Result<CpwlInstance> {
    if net.output_dim() != 1 {
        return Err(Error::InvalidArgs("region extraction needs scalar output"));
    }
    let relus = net.stats().hidden_neurons;
    if relus > MAX_RELUS {
        return Err(Error::TooManyNeurons(relus));
    }
    let n = net.input_dim();

    let inputs: Vec<AffineMap> = (0..n)
        .map(|i| {
            let mut gradient = vec![Rat::zero(); n];
            gradient[i] = Rat::one();
            AffineMap::new(gradient, Rat::zero())
        })
        .collect();

    let mut state = Search {
        net,
        dim: n,
        rows_a: Vec::new(),
        rows_b: Vec::new(),
        pieces: Vec::new(),
    };
    let root = InteriorWitness {
        center: vec![Rat::zero(); n],
        margin: Rat::one(),
    };
    state.layer(0, inputs, root)?;
    CpwlInstance::new(n, state.pieces)
}

struct Search<'a> {
    net: &'a ReluNetwork,
    dim: usize,
    rows_a: Vec<Vector>,
    rows_b: Vec<Rat>,
    pieces: Vec<Piece>,
}

impl Search<'_> {
    /// `carried` is the affine map of this layer's input in terms of the
    /// original network input, valid on the region described by the
    /// accumulated rows.
    fn layer(&mut self, idx: usize, carried: Vec<AffineMap>, witness: InteriorWitness) -> Result<()> {
        let layer = &self.net.layers()[idx];
        let pre = apply_layer(layer, &carried);
        if idx + 1 == self.net.depth() {
            let mat = if self.rows_a.is_empty() {
                Matrix::zeros(0, self.dim)
            } else {
                Matrix::from_rows(self.rows_a.clone())?
            };
            self.pieces.push(Piece {
                region: Polyhedron::new(mat, self.rows_b.clone())?,
                map: pre.into_iter().next().expect("scalar output"),
                interior: Some(witness),
            });
            return Ok(());
        }
        self.neuron(idx, pre, 0, Vec::new(), witness)
    }

    /// Branches on the activation of neuron `j` of layer `idx`. Constant
    /// pre-activations take their single consistent branch without adding a
    /// constraint.
    fn neuron(
        &mut self,
        idx: usize,
        pre: Vec<AffineMap>,
        j: usize,
        mut fixed: Vec<AffineMap>,
        witness: InteriorWitness,
    ) -> Result<()> {
        if j == pre.len() {
            return self.layer(idx + 1, fixed, witness);
        }
        let h = &pre[j];
        if h.gradient.iter().all(Rat::is_zero) {
            let rectified = if h.offset.is_positive() {
                h.clone()
            } else {
                AffineMap::constant(self.dim, Rat::zero())
            };
            fixed.push(rectified);
            return self.neuron(idx, pre, j + 1, fixed, witness);
        }
        for on in [true, false] {
            // on: h >= 0 as -grad . x <= offset; off: h <= 0 mirrored.
            let (row, rhs): (Vector, Rat) = if on {
                (h.gradient.iter().map(|g| -g).collect(), h.offset.clone())
            } else {
                (h.gradient.clone(), -&h.offset)
            };
            self.rows_a.push(row);
            self.rows_b.push(rhs);
            if let Some(w) = self.strict_witness()? {
                let mut next = fixed.clone();
                next.push(if on {
                    h.clone()
                } else {
                    AffineMap::constant(self.dim, Rat::zero())
                });
                self.neuron(idx, pre.clone(), j + 1, next, w)?;
            }
            self.rows_a.pop();
            self.rows_b.pop();
        }
        Ok(())
    }

    fn strict_witness(&self) -> Result<Option<InteriorWitness>> {
        let dim = self.dim;
        let mut rows: Vec<Vector> = Vec::with_capacity(self.rows_a.len() + 2);
        let mut rhs: Vec<Rat> = Vec::with_capacity(self.rows_b.len() + 2);
        for (a, b) in self.rows_a.iter().zip(&self.rows_b) {
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
                    Ok(Some(InteriorWitness {
                        center: point,
                        margin: value,
                    }))
                } else {
                    Ok(None)
                }
            }
        }
    }
}

/// Pushes affine input maps through one affine layer.
fn apply_layer(layer: &Layer, inputs: &[AffineMap]) -> Vec<AffineMap> {
    let n = inputs.first().map_or(0, AffineMap::dim);
    (0..layer.out_dim())
        .map(|r| {
            let mut gradient = vec![Rat::zero(); n];
            let mut offset = layer.b[r].clone();
            for (c, input) in layer.w.row(r).iter().zip(inputs) {
                if c.is_zero() {
                    continue;
                }
                for (g, ig) in gradient.iter_mut().zip(&input.gradient) {
                    if !ig.is_zero() {
                        *g += &(c * ig);
                    }
                }
                offset += &(c * &input.offset);
            }
            AffineMap::new(gradient, offset)
        })
        .collect()
}
