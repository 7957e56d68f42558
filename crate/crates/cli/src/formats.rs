//! JSON formats for instances and networks. Rationals are strings ("p/q",
//! or "p" for integers, sign on the numerator); weight matrices are
//! row-major. Parse failures carry the JSON path of the offending field.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use cpwl2relu_core::compiler::{CpwlInstance, Piece};
use cpwl2relu_core::geometry::{AffineMap, InteriorWitness, Polyhedron};
use cpwl2relu_core::linalg::Matrix;
use cpwl2relu_core::rat::Rat;
use cpwl2relu_core::relunet::{Layer, ReluNetwork};

/// A parse or shape problem, with the location that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl ParseError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ParseError {}

fn rat_from(path: &str, s: &str) -> Result<Rat, ParseError> {
    Rat::from_str(s).map_err(|e| ParseError::new(path, format!("bad rational {s:?} ({e})")))
}

fn rat_vec(path: &str, items: &[String]) -> Result<Vec<Rat>, ParseError> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| rat_from(&format!("{path}[{i}]"), s))
        .collect()
}

fn rat_matrix(path: &str, rows: &[Vec<String>], cols: usize) -> Result<Matrix, ParseError> {
    let parsed: Vec<Vec<Rat>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != cols {
                return Err(ParseError::new(
                    format!("{path}[{i}]"),
                    format!("expected {cols} columns, found {}", row.len()),
                ));
            }
            rat_vec(&format!("{path}[{i}]"), row)
        })
        .collect::<Result<_, _>>()?;
    if parsed.is_empty() {
        return Ok(Matrix::zeros(0, cols));
    }
    Matrix::from_rows(parsed).map_err(|e| ParseError::new(path, e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct MapDto {
    a: Vec<String>,
    b: String,
}

#[derive(Serialize, Deserialize)]
struct WitnessDto {
    center: Vec<String>,
    margin: String,
}

#[derive(Serialize, Deserialize)]
struct PieceDto {
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    b: Vec<String>,
    f: MapDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    interior: Option<WitnessDto>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    n: usize,
    pieces: Vec<PieceDto>,
}

#[derive(Serialize, Deserialize)]
struct LayerDto {
    #[serde(rename = "W")]
    w: Vec<Vec<String>>,
    b: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDto {
    input_dim: usize,
    layers: Vec<LayerDto>,
    arithmetic: String,
}

pub fn instance_to_json(inst: &CpwlInstance) -> String {
    let dto = InstanceDto {
        n: inst.input_dim,
        pieces: inst
            .pieces
            .iter()
            .map(|p| PieceDto {
                a: (0..p.region.num_constraints())
                    .map(|i| p.region.a.row(i).iter().map(Rat::to_string).collect())
                    .collect(),
                b: p.region.b.iter().map(Rat::to_string).collect(),
                f: MapDto {
                    a: p.map.gradient.iter().map(Rat::to_string).collect(),
                    b: p.map.offset.to_string(),
                },
                interior: p.interior.as_ref().map(|w| WitnessDto {
                    center: w.center.iter().map(Rat::to_string).collect(),
                    margin: w.margin.to_string(),
                }),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("serializable") + "\n"
}

pub fn instance_from_json(text: &str) -> Result<CpwlInstance, ParseError> {
    let dto: InstanceDto = serde_json::from_str(text)
        .map_err(|e| ParseError::new("<document>", e.to_string()))?;
    if dto.n == 0 {
        return Err(ParseError::new("n", "input dimension must be positive"));
    }
    let mut pieces = Vec::with_capacity(dto.pieces.len());
    for (i, p) in dto.pieces.iter().enumerate() {
        let base = format!("pieces[{i}]");
        let a = rat_matrix(&format!("{base}.A"), &p.a, dto.n)?;
        let b = rat_vec(&format!("{base}.b"), &p.b)?;
        if b.len() != a.num_rows() {
            return Err(ParseError::new(
                format!("{base}.b"),
                format!("expected {} entries, found {}", a.num_rows(), b.len()),
            ));
        }
        if p.f.a.len() != dto.n {
            return Err(ParseError::new(
                format!("{base}.f.a"),
                format!("expected {} entries, found {}", dto.n, p.f.a.len()),
            ));
        }
        let gradient = rat_vec(&format!("{base}.f.a"), &p.f.a)?;
        let offset = rat_from(&format!("{base}.f.b"), &p.f.b)?;
        let interior = match &p.interior {
            None => None,
            Some(w) => {
                if w.center.len() != dto.n {
                    return Err(ParseError::new(
                        format!("{base}.interior.center"),
                        format!("expected {} entries, found {}", dto.n, w.center.len()),
                    ));
                }
                Some(InteriorWitness {
                    center: rat_vec(&format!("{base}.interior.center"), &w.center)?,
                    margin: rat_from(&format!("{base}.interior.margin"), &w.margin)?,
                })
            }
        };
        let region = Polyhedron::new(a, b)
            .map_err(|e| ParseError::new(base.clone(), e.to_string()))?;
        pieces.push(Piece {
            region,
            map: AffineMap::new(gradient, offset),
            interior,
        });
    }
    CpwlInstance::new(dto.n, pieces).map_err(|e| ParseError::new("pieces", e.to_string()))
}

pub fn network_to_json(net: &ReluNetwork) -> String {
    let dto = NetworkDto {
        input_dim: net.input_dim(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerDto {
                w: (0..l.w.num_rows())
                    .map(|i| l.w.row(i).iter().map(Rat::to_string).collect())
                    .collect(),
                b: l.b.iter().map(Rat::to_string).collect(),
            })
            .collect(),
        arithmetic: "rational".into(),
    };
    serde_json::to_string_pretty(&dto).expect("serializable") + "\n"
}

pub fn network_from_json(text: &str) -> Result<ReluNetwork, ParseError> {
    let dto: NetworkDto = serde_json::from_str(text)
        .map_err(|e| ParseError::new("<document>", e.to_string()))?;
    if dto.arithmetic != "rational" {
        return Err(ParseError::new(
            "arithmetic",
            format!("unsupported arithmetic {:?}", dto.arithmetic),
        ));
    }
    let mut layers = Vec::with_capacity(dto.layers.len());
    let mut fan_in = dto.input_dim;
    for (i, l) in dto.layers.iter().enumerate() {
        let base = format!("layers[{i}]");
        let w = rat_matrix(&format!("{base}.W"), &l.w, fan_in)?;
        if w.num_rows() == 0 {
            return Err(ParseError::new(format!("{base}.W"), "layer has no rows"));
        }
        let b = rat_vec(&format!("{base}.b"), &l.b)?;
        let layer = Layer::new(w, b)
            .map_err(|e| ParseError::new(format!("{base}.b"), e.to_string()))?;
        fan_in = layer.out_dim();
        layers.push(layer);
    }
    ReluNetwork::new(dto.input_dim, layers)
        .map_err(|e| ParseError::new("layers", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpwl2relu_core::builders::{extremum_network, ExtremumKind};
    use cpwl2relu_core::generate::gen_1d;

    #[test]
    fn instance_round_trip() {
        let inst = gen_1d(5, 11);
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn network_round_trip_preserves_rationals() {
        let maps = [
            AffineMap::new(vec![Rat::new(1, 3)], Rat::new(-2, 7)),
            AffineMap::new(vec![Rat::new(-5, 2)], Rat::new(0, 1)),
        ];
        let net = extremum_network(&maps, ExtremumKind::Min).unwrap();
        let text = network_to_json(&net);
        assert!(text.contains("1/3"));
        let back = network_from_json(&text).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn mismatched_layer_shapes_are_reported_with_path() {
        let text = r#"{
            "input_dim": 1,
            "layers": [
                {"W": [["1"], ["-1"]], "b": ["0", "0"]},
                {"W": [["1", "1", "1"]], "b": ["0"]}
            ],
            "arithmetic": "rational"
        }"#;
        let err = network_from_json(text).unwrap_err();
        assert_eq!(err.path, "layers[1].W[0]");
    }

    #[test]
    fn bad_rational_is_reported_with_path() {
        let text = r#"{"n": 1, "pieces": [{"A": [], "b": [], "f": {"a": ["x"], "b": "0"}}]}"#;
        let err = instance_from_json(text).unwrap_err();
        assert_eq!(err.path, "pieces[0].f.a[0]");
    }
}
