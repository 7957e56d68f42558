//! From pieces to a network: discovers the distinct linear components of a
//! CPWL instance, computes per-piece active sets by LP dominance tests, and
//! assembles the max-min form as one min network per piece, concatenated and
//! fed into a max network over the piece outputs.

use alloc::vec;
use alloc::vec::Vec;

use crate::builders::{self, ExtremumKind};
use crate::geometry::{
    affinely_independent_samples, dominates, interior_point, intersection_nonempty,
    AffineMap, InteriorWitness, Polyhedron,
};
use crate::linalg::{dot, Matrix, Vector};
use crate::lp::{lp_solve, LpOutcome, Sense};
use crate::rat::Rat;
use crate::relunet::ReluNetwork;
use crate::{Error, Result};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// One polyhedral piece and the affine map the function takes on it. The
/// interior witness is optional; it is computed by LP when absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub region: Polyhedron,
    pub map: AffineMap,
    pub interior: Option<InteriorWitness>,
}

/// A CPWL function given as `q` pieces covering `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpwlInstance {
    pub input_dim: usize,
    pub pieces: Vec<Piece>,
}

impl CpwlInstance {
    pub fn new(input_dim: usize, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyList);
        }
        for p in &pieces {
            if p.region.dim() != input_dim || p.map.dim() != input_dim {
                return Err(Error::DimensionMismatch("instance piece dimensions"));
            }
            if let Some(w) = &p.interior {
                if w.center.len() != input_dim {
                    return Err(Error::DimensionMismatch("instance witness dimension"));
                }
            }
        }
        Ok(CpwlInstance { input_dim, pieces })
    }

    pub fn q(&self) -> usize {
        self.pieces.len()
    }

    /// Value of the function at `x`: the map of the first piece containing
    /// it. `None` when no piece covers `x`.
    pub fn eval_at(&self, x: &[Rat]) -> Option<Rat> {
        self.pieces
            .iter()
            .find(|p| p.region.contains(x))
            .map(|p| p.map.eval(x))
    }

    /// Returns one witness per piece, solving the interior LP for pieces
    /// that do not carry one. Supplied witnesses are trusted here; `validate`
    /// checks them.
    pub fn resolved_witnesses(&self) -> Result<Vec<InteriorWitness>> {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| match &p.interior {
                Some(w) => Ok(w.clone()),
                None => interior_point(&p.region).map_err(|e| match e {
                    Error::Infeasible => Error::EmptyPiece(i),
                    other => other,
                }),
            })
            .collect()
    }
}

/// The distinct linear components of an instance and the component each
/// piece belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentIndex {
    pub components: Vec<AffineMap>,
    pub piece_to_component: Vec<usize>,
}

impl ComponentIndex {
    pub fn k(&self) -> usize {
        self.components.len()
    }
}

/// Recovers every distinct linear component by black-box evaluation: the
/// instance is probed at `n + 1` affinely independent points inside each
/// piece, the affine map is fitted by an exact linear solve, and exact
/// duplicates are merged.
pub fn find_distinct_components(inst: &CpwlInstance) -> Result<ComponentIndex> {
    let witnesses = inst.resolved_witnesses()?;
    find_distinct_components_with(inst, &witnesses)
}

fn find_distinct_components_with(
    inst: &CpwlInstance,
    witnesses: &[InteriorWitness],
) -> Result<ComponentIndex> {
    let n = inst.input_dim;
    let mut components: Vec<AffineMap> = Vec::new();
    let mut piece_to_component = Vec::with_capacity(inst.q());

    for (i, piece) in inst.pieces.iter().enumerate() {
        let samples = affinely_independent_samples(&witnesses[i], &piece.region.a);
        let values: Vec<Rat> = samples
            .iter()
            .map(|x| inst.eval_at(x).ok_or(Error::InconsistentFit(i)))
            .collect::<Result<_>>()?;

        // Rows of the fit system are the sample offsets from the center;
        // the solve is exact, so the fit interpolates the observed values.
        let rows: Vec<Vector> = samples[1..]
            .iter()
            .map(|x| x.iter().zip(&samples[0]).map(|(a, b)| a - b).collect())
            .collect();
        let system = Matrix::from_rows(rows)?;
        let rhs: Vec<Rat> = values[1..].iter().map(|y| y - &values[0]).collect();
        let gradient = crate::linalg::solve_linear_system(&system, &rhs).map_err(|e| match e {
            Error::SingularMatrix => Error::SingularFit(i),
            other => other,
        })?;
        let offset = &values[0] - &dot(&gradient, &samples[0]);
        let fitted = AffineMap::new(gradient, offset);

        if samples
            .iter()
            .any(|x| fitted.eval(x) != piece.map.eval(x))
        {
            return Err(Error::InconsistentFit(i));
        }
        debug_assert_eq!(fitted, inst.pieces[i].map, "fit determines the map on {n}+1 points");

        let idx = match components.iter().position(|c| c == &fitted) {
            Some(idx) => idx,
            None => {
                components.push(fitted);
                components.len() - 1
            }
        };
        piece_to_component.push(idx);
    }

    Ok(ComponentIndex {
        components,
        piece_to_component,
    })
}

/// Indices of components that dominate the function on the given piece:
/// `j` is active on piece `i` iff `f_j >= p` everywhere on the piece. Ties
/// (an LP minimum of exactly zero) count as domination, so the piece's own
/// component is always present.
pub fn active_set(inst: &CpwlInstance, comps: &ComponentIndex, piece: usize) -> Result<Vec<usize>> {
    let own = comps.piece_to_component[piece];
    let region = &inst.pieces[piece].region;
    let own_map = &comps.components[own];
    let mut set = Vec::new();
    for (j, candidate) in comps.components.iter().enumerate() {
        let dominated = dominates(candidate, own_map, region).map_err(|e| match e {
            Error::Infeasible => Error::EmptyPiece(piece),
            other => other,
        })?;
        if dominated {
            set.push(j);
        }
    }
    debug_assert!(set.contains(&own));
    Ok(set)
}

/// A compiled network together with the intermediate data the size
/// accounting is checked against.
#[derive(Clone, Debug)]
pub struct Compilation {
    pub network: ReluNetwork,
    pub components: ComponentIndex,
    pub active_sets: Vec<Vec<usize>>,
}

/// Compiles an instance into a network computing the same function
/// everywhere. Pieces become min networks over their active components,
/// run in parallel and fed into a max network over the `q` outputs; an
/// affine instance compiles to a single affine layer.
pub fn compile(inst: &CpwlInstance) -> Result<ReluNetwork> {
    compile_with_details(inst).map(|c| c.network)
}

pub fn compile_with_details(inst: &CpwlInstance) -> Result<Compilation> {
    let witnesses = inst.resolved_witnesses()?;
    let components = find_distinct_components_with(inst, &witnesses)?;
    let q = inst.q();

    let mut active_sets = Vec::with_capacity(q);
    let mut piece_nets = Vec::with_capacity(q);
    for i in 0..q {
        let set = active_set(inst, &components, i)?;
        let maps: Vec<AffineMap> = set.iter().map(|&j| components.components[j].clone()).collect();
        piece_nets.push(builders::extremum_network(&maps, ExtremumKind::Min)?);
        active_sets.push(set);
    }

    let stacked = builders::concat(&piece_nets)?;
    let projections: Vec<AffineMap> = (0..q)
        .map(|m| {
            let mut gradient = vec![Rat::zero(); q];
            gradient[m] = Rat::one();
            AffineMap::new(gradient, Rat::zero())
        })
        .collect();
    let max_stage = builders::extremum_network(&projections, ExtremumKind::Max)?;
    let network = builders::compose(&stacked, &max_stage)?;

    Ok(Compilation {
        network,
        components,
        active_sets,
    })
}

/// One problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The piece's region is empty.
    EmptyPiece { piece: usize },
    /// The piece's region has no interior point.
    EmptyInterior { piece: usize },
    /// A supplied witness does not certify its piece.
    BadWitness { piece: usize },
    /// Two pieces overlap but their maps differ there; `at` is a point of
    /// the overlap where the gap is extremal (`None` when the gap is
    /// unbounded over the overlap).
    Inconsistent {
        first: usize,
        second: usize,
        at: Option<Vector>,
        gap: Option<Rat>,
    },
    /// A sampled point lies outside every piece.
    Uncovered { point: Vector },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::EmptyPiece { piece } => write!(f, "piece {piece}: empty region"),
            Violation::EmptyInterior { piece } => write!(f, "piece {piece}: empty interior"),
            Violation::BadWitness { piece } => {
                write!(f, "piece {piece}: supplied interior witness is invalid")
            }
            Violation::Inconsistent {
                first,
                second,
                at,
                gap,
            } => {
                write!(f, "pieces {first} and {second}: maps differ on the overlap")?;
                if let Some(gap) = gap {
                    write!(f, " (gap {gap}")?;
                    if let Some(at) = at {
                        write!(f, " at {at:?}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Violation::Uncovered { point } => {
                write!(f, "point {point:?} is not covered by any piece")
            }
        }
    }
}

/// Outcome of instance validation; empty means the instance is a
/// well-formed CPWL function as far as the checks can see.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub coverage_samples: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that (a) every piece has an interior witness, (b) overlapping
/// pieces agree exactly on their overlap (the minimum and maximum of the map
/// difference over the overlap are both zero), and (c) sampled random
/// points are covered by at least one piece.
pub fn validate(inst: &CpwlInstance, samples: usize, seed: u64) -> ValidationReport {
    let mut report = ValidationReport {
        violations: Vec::new(),
        coverage_samples: samples,
    };

    for (i, piece) in inst.pieces.iter().enumerate() {
        match &piece.interior {
            Some(w) => {
                if !w.certifies(&piece.region) {
                    report.violations.push(Violation::BadWitness { piece: i });
                }
            }
            None => match interior_point(&piece.region) {
                Ok(_) => {}
                Err(Error::Infeasible) => {
                    report.violations.push(Violation::EmptyPiece { piece: i })
                }
                Err(_) => report.violations.push(Violation::EmptyInterior { piece: i }),
            },
        }
    }

    for i in 0..inst.q() {
        for j in i + 1..inst.q() {
            let pi = &inst.pieces[i];
            let pj = &inst.pieces[j];
            match intersection_nonempty(&pi.region, &pj.region) {
                Ok(false) | Err(_) => continue,
                Ok(true) => {}
            }
            let overlap = match pi.region.intersection(&pj.region) {
                Ok(o) => o,
                Err(_) => continue,
            };
            let diff = pi.map.sub(&pj.map);
            for sense in [Sense::Min, Sense::Max] {
                match lp_solve(&diff.gradient, &overlap.a, &overlap.b, sense) {
                    Ok(LpOutcome::Optimal { value, point }) => {
                        let gap = value + &diff.offset;
                        if !gap.is_zero() {
                            report.violations.push(Violation::Inconsistent {
                                first: i,
                                second: j,
                                at: Some(point),
                                gap: Some(gap),
                            });
                        }
                    }
                    Ok(LpOutcome::Unbounded) => {
                        report.violations.push(Violation::Inconsistent {
                            first: i,
                            second: j,
                            at: None,
                            gap: None,
                        });
                    }
                    _ => {}
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = coverage_radius(inst);
    for _ in 0..samples {
        let point: Vector = (0..inst.input_dim)
            .map(|_| {
                let span = 16 * radius + 1;
                let numer = (rng.next_u64() % (2 * span + 1)) as i64 - span as i64;
                Rat::new(numer, 8)
            })
            .collect();
        if inst.eval_at(&point).is_none() {
            report.violations.push(Violation::Uncovered { point });
        }
    }

    report
}

/// Sampling half-width for coverage checks: 1 plus the largest right-hand
/// side magnitude, so gaps between pieces around the constraint boundaries
/// fall inside the sampled box.
fn coverage_radius(inst: &CpwlInstance) -> u64 {
    let mut best = Rat::one();
    for piece in &inst.pieces {
        for v in &piece.region.b {
            let m = v.abs();
            if m > best {
                best = m;
            }
        }
    }
    let bound = &best + &Rat::one();
    let ceil = (bound.numer() + bound.denom() - 1u32) / bound.denom();
    ceil.min(BigInt::from(1024u32)).to_u64().unwrap_or(1024).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn ints(vals: &[i64]) -> Vec<Rat> {
        vals.iter().map(|&v| Rat::from_int(v)).collect()
    }

    fn halfline_piece(sign: i64, at: Rat, map: AffineMap) -> Piece {
        // sign = +1: { x <= at }, sign = -1: { x >= at }
        let a = Matrix::from_rows(vec![vec![Rat::from_int(sign)]]).unwrap();
        let b = vec![if sign > 0 { at } else { -at }];
        Piece {
            region: Polyhedron::new(a, b).unwrap(),
            map,
            interior: None,
        }
    }

    pub(crate) fn abs_instance() -> CpwlInstance {
        CpwlInstance::new(
            1,
            vec![
                halfline_piece(1, Rat::zero(), AffineMap::new(ints(&[-1]), Rat::zero())),
                halfline_piece(-1, Rat::zero(), AffineMap::new(ints(&[1]), Rat::zero())),
            ],
        )
        .unwrap()
    }

    fn hat_instance() -> CpwlInstance {
        // min(x, 1 - x), split at 1/2
        CpwlInstance::new(
            1,
            vec![
                halfline_piece(1, rat(1, 2), AffineMap::new(ints(&[1]), Rat::zero())),
                halfline_piece(-1, rat(1, 2), AffineMap::new(ints(&[-1]), Rat::one())),
            ],
        )
        .unwrap()
    }

    #[test]
    fn distinct_components_of_abs() {
        let comps = find_distinct_components(&abs_instance()).unwrap();
        assert_eq!(comps.k(), 2);
        assert_eq!(comps.piece_to_component, vec![0, 1]);
    }

    #[test]
    fn duplicate_maps_collapse() {
        let f = AffineMap::new(ints(&[3]), Rat::zero());
        let inst = CpwlInstance::new(
            1,
            vec![
                halfline_piece(1, Rat::zero(), f.clone()),
                halfline_piece(-1, Rat::zero(), f.clone()),
            ],
        )
        .unwrap();
        let comps = find_distinct_components(&inst).unwrap();
        assert_eq!(comps.k(), 1);
        assert_eq!(comps.piece_to_component, vec![0, 0]);
    }

    #[test]
    fn inconsistent_witness_is_reported() {
        // A witness pointing into the wrong piece makes the fitted map
        // disagree with the declared one.
        let mut inst = abs_instance();
        inst.pieces[0].interior = Some(InteriorWitness {
            center: ints(&[5]),
            margin: Rat::one(),
        });
        assert_eq!(
            find_distinct_components(&inst).unwrap_err(),
            Error::InconsistentFit(0)
        );
    }

    #[test]
    fn components_match_generator_bookkeeping() {
        for seed in [0u64, 5, 9] {
            let inst = crate::generate::gen_1d(8, seed);
            let mut truth: Vec<AffineMap> = Vec::new();
            for p in &inst.pieces {
                if !truth.contains(&p.map) {
                    truth.push(p.map.clone());
                }
            }
            let comps = find_distinct_components(&inst).unwrap();
            assert_eq!(comps.k(), truth.len(), "seed {seed}");
            for c in &comps.components {
                assert!(truth.contains(c), "seed {seed}");
            }
            for (i, &ci) in comps.piece_to_component.iter().enumerate() {
                assert_eq!(comps.components[ci], inst.pieces[i].map, "seed {seed}");
            }
        }
    }

    #[test]
    fn active_sets_of_abs() {
        let inst = abs_instance();
        let comps = find_distinct_components(&inst).unwrap();
        // Right piece { x >= 0 }: only x dominates |x| there.
        let right = active_set(&inst, &comps, 1).unwrap();
        assert_eq!(right, vec![1]);
        let left = active_set(&inst, &comps, 0).unwrap();
        assert_eq!(left, vec![0]);
    }

    #[test]
    fn active_sets_of_hat_contain_both_components() {
        let inst = hat_instance();
        let comps = find_distinct_components(&inst).unwrap();
        assert_eq!(active_set(&inst, &comps, 0).unwrap(), vec![0, 1]);
        assert_eq!(active_set(&inst, &comps, 1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn affine_instance_compiles_to_one_layer() {
        let inst = CpwlInstance::new(
            2,
            vec![Piece {
                region: Polyhedron::full_space(2),
                map: AffineMap::new(ints(&[2, -1]), rat(1, 3)),
                interior: None,
            }],
        )
        .unwrap();
        let net = compile(&inst).unwrap();
        let stats = net.stats();
        assert_eq!((stats.depth, stats.hidden_neurons), (1, 0));
        let x = vec![rat(1, 2), rat(-2, 1)];
        assert_eq!(net.evaluate(&x).unwrap()[0], inst.eval_at(&x).unwrap());
    }

    #[test]
    fn compiled_abs_matches_pointwise() {
        let net = compile(&abs_instance()).unwrap();
        for v in [-2i64, 0, 3] {
            let out = net.evaluate(&ints(&[v])).unwrap();
            assert_eq!(out[0], Rat::from_int(v.abs()));
        }
    }

    #[test]
    fn compiled_hat_matches_and_fits_bounds() {
        let inst = hat_instance();
        let compiled = compile_with_details(&inst).unwrap();
        let net = &compiled.network;
        // Breakpoint and a sweep of rationals on both sides.
        let hat = |x: &Rat| (x.clone()).min(Rat::one() - x);
        assert_eq!(net.evaluate(&[rat(1, 2)]).unwrap()[0], rat(1, 2));
        for numer in -25i64..25 {
            let x = rat(numer, 8);
            assert_eq!(net.evaluate(std::slice::from_ref(&x)).unwrap()[0], hat(&x), "x = {x}");
        }
        let bound = bounds::component_piece_bounds_u64(2, 2).unwrap();
        assert_eq!(bound.layers, 3);
        assert_eq!(bound.max_width, 6u32.into());
        assert_eq!(bound.hidden, 11u32.into());
        assert!(bound.admits(&net.stats()));
    }

    #[test]
    fn redundant_pieces_compile_to_the_same_function() {
        // max(x, 0) covered by its two natural pieces plus a redundant
        // sub-piece of the right one; compilation works with the supplied
        // piece list as is.
        let xmap = AffineMap::new(ints(&[1]), Rat::zero());
        let zero = AffineMap::new(ints(&[0]), Rat::zero());
        let band = Polyhedron::new(
            Matrix::from_ints(&[&[-1], &[1]]),
            vec![Rat::zero(), Rat::one()],
        )
        .unwrap();
        let inst = CpwlInstance::new(
            1,
            vec![
                halfline_piece(1, Rat::zero(), zero),
                halfline_piece(-1, Rat::zero(), xmap.clone()),
                Piece {
                    region: band,
                    map: xmap,
                    interior: None,
                },
            ],
        )
        .unwrap();
        assert!(validate(&inst, 32, 0).passed());
        let compiled = compile_with_details(&inst).unwrap();
        assert_eq!(compiled.components.k(), 2);
        for numer in -12i64..=12 {
            let x = rat(numer, 4);
            let expect = x.clone().max(Rat::zero());
            assert_eq!(compiled.network.evaluate(&[x]).unwrap()[0], expect);
        }
    }

    #[test]
    fn maxmin_identity_at_piece_centers() {
        for inst in [abs_instance(), hat_instance()] {
            let comps = find_distinct_components(&inst).unwrap();
            let witnesses = inst.resolved_witnesses().unwrap();
            for (i, witness) in witnesses.iter().enumerate() {
                let set = active_set(&inst, &comps, i).unwrap();
                let x = &witness.center;
                let min = set
                    .iter()
                    .map(|&j| comps.components[j].eval(x))
                    .min()
                    .unwrap();
                assert_eq!(min, inst.eval_at(x).unwrap());
            }
        }
    }

    #[test]
    fn validation_passes_on_abs() {
        let report = validate(&abs_instance(), 64, 0);
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn validation_catches_discontinuity() {
        let mut inst = abs_instance();
        inst.pieces[1].map = AffineMap::new(ints(&[1]), Rat::one()); // x + 1
        let report = validate(&inst, 16, 0);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Inconsistent { .. })));
    }

    #[test]
    fn validation_catches_coverage_gap() {
        let inst = CpwlInstance::new(
            1,
            vec![
                halfline_piece(1, rat(-1, 1), AffineMap::new(ints(&[1]), Rat::zero())),
                halfline_piece(-1, rat(1, 1), AffineMap::new(ints(&[1]), Rat::zero())),
            ],
        )
        .unwrap();
        let report = validate(&inst, 64, 1);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Uncovered { .. })));
    }

    #[test]
    fn validation_catches_empty_pieces() {
        let empty_region = Polyhedron::new(
            Matrix::from_ints(&[&[1], &[-1]]),
            vec![rat(-1, 1), rat(-1, 1)],
        )
        .unwrap();
        let inst = CpwlInstance::new(
            1,
            vec![
                Piece {
                    region: Polyhedron::full_space(1),
                    map: AffineMap::new(ints(&[1]), Rat::zero()),
                    interior: None,
                },
                Piece {
                    region: empty_region,
                    map: AffineMap::new(ints(&[1]), Rat::zero()),
                    interior: None,
                },
            ],
        )
        .unwrap();
        let report = validate(&inst, 8, 0);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EmptyPiece { piece: 1 })));
    }
}
