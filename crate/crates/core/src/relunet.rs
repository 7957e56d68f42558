//! The ReLU network data model: layers of affine maps with ReLU applied
//! between consecutive layers and never after the last one. A 1-layer
//! network is a bare affine map.

use alloc::vec::Vec;

use crate::linalg::{Matrix, Vector};
use crate::rat::Rat;
use crate::{Error, Result};

/// One affine layer, `x -> w x + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub w: Matrix,
    pub b: Vector,
}

impl Layer {
    pub fn new(w: Matrix, b: Vector) -> Result<Self> {
        if w.num_rows() != b.len() {
            return Err(Error::DimensionMismatch("layer bias length"));
        }
        Ok(Layer { w, b })
    }

    pub fn out_dim(&self) -> usize {
        self.w.num_rows()
    }
}

/// Size measures: the output layer never counts as hidden, so a 1-layer
/// network has 0 hidden neurons and max width 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetStats {
    pub depth: usize,
    pub hidden_neurons: usize,
    pub max_width: usize,
}

/// A feed-forward ReLU network with exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<Layer>,
}

impl ReluNetwork {
    /// Validates layer shapes: the first layer consumes `input_dim`, each
    /// following layer consumes the previous layer's output.
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::EmptyList);
        }
        let mut expected = input_dim;
        for layer in &layers {
            if layer.w.num_cols() != expected {
                return Err(Error::DimensionMismatch("adjacent layer shapes"));
            }
            expected = layer.out_dim();
        }
        Ok(ReluNetwork { input_dim, layers })
    }

    /// A 1-layer network computing `x -> w x + b`.
    pub fn affine(w: Matrix, b: Vector) -> Result<Self> {
        let input_dim = w.num_cols();
        ReluNetwork::new(input_dim, alloc::vec![Layer::new(w, b)?])
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("nonempty").out_dim()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn stats(&self) -> NetStats {
        let hidden = &self.layers[..self.layers.len() - 1];
        NetStats {
            depth: self.layers.len(),
            hidden_neurons: hidden.iter().map(Layer::out_dim).sum(),
            max_width: hidden.iter().map(Layer::out_dim).max().unwrap_or(0),
        }
    }

    /// Exact forward pass; ReLU between layers only.
    pub fn evaluate(&self, x: &[Rat]) -> Result<Vector> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch("network input"));
        }
        let mut acc = affine_apply(&self.layers[0], x);
        for layer in &self.layers[1..] {
            for v in acc.iter_mut() {
                if v.is_negative() {
                    *v = Rat::zero();
                }
            }
            acc = affine_apply(layer, &acc);
        }
        Ok(acc)
    }

    /// f64 forward pass, for speed comparisons only. Geometry and all
    /// acceptance checks stay on the rational path.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch("network input"));
        }
        let mut acc = affine_apply_f64(&self.layers[0], x);
        for layer in &self.layers[1..] {
            for v in acc.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            acc = affine_apply_f64(layer, &acc);
        }
        Ok(acc)
    }
}

fn affine_apply(layer: &Layer, x: &[Rat]) -> Vector {
    let mut out = layer.w.mul_vec(x).expect("validated shape");
    for (o, b) in out.iter_mut().zip(&layer.b) {
        *o += b;
    }
    out
}

fn affine_apply_f64(layer: &Layer, x: &[f64]) -> Vec<f64> {
    let w = &layer.w;
    (0..w.num_rows())
        .map(|i| {
            let mut acc = layer.b[i].to_f64();
            for (c, xv) in w.row(i).iter().zip(x) {
                if !c.is_zero() {
                    acc += c.to_f64() * xv;
                }
            }
            acc
        })
        .collect()
}
