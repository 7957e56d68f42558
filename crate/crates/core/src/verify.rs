//! Exact functional comparison of a network against a CPWL instance.


use rand_core::RngCore;

use crate::compiler::CpwlInstance;
use crate::geometry::{affinely_independent_samples, max_abs_entry};
use crate::linalg::Vector;
use crate::rat::Rat;
use crate::relunet::ReluNetwork;
use crate::{Error, Result};

/// First point where the two sides disagreed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub point: Vector,
    pub expected: Rat,
    pub actual: Rat,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub points_checked: usize,
    pub mismatch: Option<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares `net` against the instance at the `n + 1` affinely independent
/// sample points of every piece plus `samples` random rational points per
/// piece, drawn around the piece's interior witness at a radius that keeps
/// them inside the piece. Equality is exact; the first mismatch is reported
/// with both values.
pub fn verify_equivalence(
    inst: &CpwlInstance,
    net: &ReluNetwork,
    samples: usize,
    seed: u64,
) -> Result<VerifyReport> {
    if net.input_dim() != inst.input_dim || net.output_dim() != 1 {
        return Err(Error::DimensionMismatch("verify_equivalence shapes"));
    }
    let witnesses = inst.resolved_witnesses()?;
    let mut rng = crate::generate::rng_from_seed(seed);
    let n = inst.input_dim;
    let mut report = VerifyReport::default();

    for (piece, witness) in inst.pieces.iter().zip(&witnesses) {
        let mut points = affinely_independent_samples(witness, &piece.region.a);

        // Random interior points: center + radius * d with d in [-1, 1]^n.
        // A step of margin / (1 + n * max|a_ij|) keeps every row within its
        // slack for any such d.
        let denom = Rat::one() + Rat::from_int(n as i64) * max_abs_entry(&piece.region.a);
        let radius = witness.margin.div(&denom).expect("positive denominator");
        for _ in 0..samples {
            let point: Vector = witness
                .center
                .iter()
                .map(|c| {
                    let numer = (rng.next_u64() % 17) as i64 - 8;
                    c + &(&radius * &Rat::new(numer, 8))
                })
                .collect();
            points.push(point);
        }

        for point in points {
            debug_assert!(piece.region.contains(&point));
            let expected = piece.map.eval(&point);
            let actual = net.evaluate(&point)?.pop().expect("scalar output");
            report.points_checked += 1;
            if expected != actual {
                report.mismatch = Some(Mismatch {
                    point,
                    expected,
                    actual,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile;
    use crate::generate::gen_1d;
    use crate::relunet::Layer;

    #[test]
    fn compiled_instance_verifies() {
        let inst = gen_1d(8, 21);
        let net = compile(&inst).unwrap();
        let report = verify_equivalence(&inst, &net, 20, 3).unwrap();
        assert!(report.passed(), "{:?}", report.mismatch);
        assert_eq!(report.points_checked, 8 * (2 + 20));
    }

    #[test]
    fn perturbed_bias_is_caught_with_witness() {
        let inst = gen_1d(6, 4);
        let net = compile(&inst).unwrap();
        let mut layers: Vec<Layer> = net.layers().to_vec();
        let last = layers.len() - 1;
        layers[last].b[0] += &Rat::new(1, 1000);
        let broken = ReluNetwork::new(net.input_dim(), layers).unwrap();
        let report = verify_equivalence(&inst, &broken, 5, 0).unwrap();
        let mismatch = report.mismatch.expect("perturbation must be detected");
        assert_eq!(&mismatch.actual - &mismatch.expected, Rat::new(1, 1000));
    }

    #[test]
    fn shape_checks() {
        let inst = gen_1d(2, 0);
        let wrong_dim = crate::builders::identity_network(2, 2);
        assert!(verify_equivalence(&inst, &wrong_dim, 1, 0).is_err());
    }
}
