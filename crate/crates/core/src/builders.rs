//! Network constructions: extremum-of-affines, identity mappings of a given
//! depth, composition, and parallel concatenation, with exact size
//! accounting.
//!
//! The extremum network halves the number of candidates per hidden layer
//! using `max(x1,x2) = max(0,x2-x1) + max(0,x1) - max(0,-x1)`, spending
//! three ReLUs per surviving pair. An odd candidate count routes the last
//! value through a two-ReLU pass-through (`max(0,x) - max(0,-x) = x`)
//! instead of padding with phantom inputs, so the hidden-neuron count is
//! exactly the recursion [`r_sequence`].

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::AffineMap;
use crate::linalg::Matrix;
use crate::rat::Rat;
use crate::relunet::{Layer, ReluNetwork};
use crate::{Error, Result};

/// Which extremum a network computes. Min is built by sign-flipping the
/// first and last layers of the max construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

/// Hidden-neuron count of the extremum network over `k` candidates:
/// `r(1) = 0`, `r(k) = 3k/2 + r(k/2)` for even `k`, and
/// `r(k) = 2 + 3(k-1)/2 + r((k+1)/2)` for odd `k > 1`.
pub fn r_sequence(k: u64) -> u64 {
    assert!(k >= 1, "r_sequence is defined for k >= 1");
    let mut total = 0;
    let mut k = k;
    while k > 1 {
        if k.is_multiple_of(2) {
            total += 3 * k / 2;
            k /= 2;
        } else {
            total += 2 + 3 * (k - 1) / 2;
            k = k.div_ceil(2);
        }
    }
    total
}

pub fn ceil_log2_u64(x: u64) -> u64 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

fn pair_reducer(c_prev: usize, c_next: usize) -> Matrix {
    // Maps c_prev running values onto the pre-activations of the next
    // layer: an A block per pair, a C pass-through for an odd leftover.
    let a = Matrix::from_ints(&[&[-1, 1], &[1, 0], &[-1, 0]]);
    let c = Matrix::from_ints(&[&[1], &[-1]]);
    if c_prev.is_multiple_of(2) {
        Matrix::block_repeat(&a, c_next)
    } else {
        let rep = Matrix::block_repeat(&a, c_next - 1);
        Matrix::block_diag(&[&rep, &c])
    }
}

fn pair_expander(c_prev2: usize, c_prev: usize) -> Matrix {
    // Collapses the previous layer's rectified outputs back to c_prev
    // running values: a B block per pair, C^T for a pass-through.
    let b = Matrix::from_ints(&[&[1, 1, -1]]);
    let ct = Matrix::from_ints(&[&[1, -1]]);
    if c_prev2.is_multiple_of(2) {
        Matrix::block_repeat(&b, c_prev)
    } else {
        let rep = Matrix::block_repeat(&b, c_prev - 1);
        Matrix::block_diag(&[&rep, &ct])
    }
}

/// Builds a network computing the max or min of the given affine maps,
/// with exactly `ceil(log2 m) + 1` layers, `r(m)` hidden neurons, and
/// first-hidden-layer width `ceil(3m/2)` for `m > 1`.
pub fn extremum_network(maps: &[AffineMap], kind: ExtremumKind) -> Result<ReluNetwork> {
    let m = maps.len();
    if m == 0 {
        return Err(Error::EmptyList);
    }
    let n = maps[0].dim();
    if maps.iter().any(|f| f.dim() != n) {
        return Err(Error::DimensionMismatch("extremum_network maps"));
    }

    let mut w = Matrix::from_rows(maps.iter().map(|f| f.gradient.clone()).collect())?;
    let mut b: Vec<Rat> = maps.iter().map(|f| f.offset.clone()).collect();
    if m == 1 {
        return ReluNetwork::affine(w, b);
    }

    let depth = ceil_log2_u64(m as u64) as usize + 1;
    let mut counts = Vec::with_capacity(depth);
    counts.push(m);
    for i in 1..depth {
        let prev = counts[i - 1];
        counts.push(if prev % 2 == 0 { prev / 2 } else { prev.div_ceil(2) });
    }
    debug_assert_eq!(counts[depth - 1], 1);

    let first = pair_reducer(counts[0], counts[1]);
    b = first.mul_vec(&b)?;
    w = first.mul(&w)?;
    let mut layers = vec![Layer::new(w, b)?];
    for i in 2..depth {
        let reduce = pair_reducer(counts[i - 1], counts[i]);
        let expand = pair_expander(counts[i - 2], counts[i - 1]);
        let w_i = reduce.mul(&expand)?;
        let rows = w_i.num_rows();
        layers.push(Layer::new(w_i, vec![Rat::zero(); rows])?);
    }
    layers.push(Layer::new(
        Matrix::from_ints(&[&[1, 1, -1]]),
        vec![Rat::zero()],
    )?);

    if kind == ExtremumKind::Min {
        let first = &mut layers[0];
        first.w = first.w.neg();
        first.b = first.b.iter().map(|v| -v).collect();
        let last_idx = layers.len() - 1;
        let last = &mut layers[last_idx];
        last.w = last.w.neg();
        last.b = last.b.iter().map(|v| -v).collect();
    }

    ReluNetwork::new(n, layers)
}

/// An `l`-layer network computing the identity on `R^n`: `2n(l-1)` hidden
/// neurons in stacked `max(0,x) - max(0,-x)` pairs, width `2n` for `l > 1`.
pub fn identity_network(n: usize, l: usize) -> ReluNetwork {
    assert!(n >= 1 && l >= 1, "identity_network needs n >= 1, l >= 1");
    if l == 1 {
        return ReluNetwork::affine(Matrix::identity(n), vec![Rat::zero(); n])
            .expect("square identity");
    }
    let split = Matrix::from_ints(&[&[1], &[-1]]);
    let join = Matrix::from_ints(&[&[1, -1]]);
    let relay = Matrix::from_ints(&[&[1, -1], &[-1, 1]]);

    let mut layers = Vec::with_capacity(l);
    layers.push(Layer::new(Matrix::block_repeat(&split, n), vec![Rat::zero(); 2 * n]).unwrap());
    for _ in 2..l {
        layers
            .push(Layer::new(Matrix::block_repeat(&relay, n), vec![Rat::zero(); 2 * n]).unwrap());
    }
    layers.push(Layer::new(Matrix::block_repeat(&join, n), vec![Rat::zero(); n]).unwrap());
    ReluNetwork::new(n, layers).expect("identity shapes conform")
}

/// The network computing `outer(inner(x))`. The junction collapses the
/// affine output layer of `inner` into the affine input layer of `outer`,
/// so the depth is `l1 + l2 - 1` and the hidden-neuron counts add.
pub fn compose(inner: &ReluNetwork, outer: &ReluNetwork) -> Result<ReluNetwork> {
    if inner.output_dim() != outer.input_dim() {
        return Err(Error::DimensionMismatch("compose"));
    }
    let inner_layers = inner.layers();
    let outer_layers = outer.layers();
    let last = inner_layers.last().expect("nonempty");
    let head = &outer_layers[0];

    let mut layers: Vec<Layer> = inner_layers[..inner_layers.len() - 1].to_vec();
    let junction_w = head.w.mul(&last.w)?;
    let mut junction_b = head.w.mul_vec(&last.b)?;
    for (acc, extra) in junction_b.iter_mut().zip(&head.b) {
        *acc += extra;
    }
    layers.push(Layer::new(junction_w, junction_b)?);
    layers.extend_from_slice(&outer_layers[1..]);
    ReluNetwork::new(inner.input_dim(), layers)
}

/// Stacks networks over a shared input into one network computing the
/// concatenation of their outputs. Shallower networks are first extended to
/// the common depth by composing with an identity network, then all weights
/// are assembled block-diagonally.
pub fn concat(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    if nets.is_empty() {
        return Err(Error::EmptyList);
    }
    let input_dim = nets[0].input_dim();
    if nets.iter().any(|g| g.input_dim() != input_dim) {
        return Err(Error::DimensionMismatch("concat input dims"));
    }
    if nets.len() == 1 {
        return Ok(nets[0].clone());
    }
    let depth = nets.iter().map(ReluNetwork::depth).max().expect("nonempty");
    let extended: Vec<ReluNetwork> = nets
        .iter()
        .map(|g| {
            if g.depth() < depth {
                compose(g, &identity_network(g.output_dim(), depth - g.depth() + 1))
            } else {
                Ok(g.clone())
            }
        })
        .collect::<Result<_>>()?;

    let firsts: Vec<&Matrix> = extended.iter().map(|g| &g.layers()[0].w).collect();
    let mut bias: Vec<Rat> = Vec::new();
    for g in &extended {
        bias.extend_from_slice(&g.layers()[0].b);
    }
    let mut layers = vec![Layer::new(Matrix::vstack(&firsts)?, bias)?];
    for i in 1..depth {
        let blocks: Vec<&Matrix> = extended.iter().map(|g| &g.layers()[i].w).collect();
        let mut bias: Vec<Rat> = Vec::new();
        for g in &extended {
            bias.extend_from_slice(&g.layers()[i].b);
        }
        layers.push(Layer::new(Matrix::block_diag(&blocks), bias)?);
    }
    ReluNetwork::new(input_dim, layers)
}
