//! Acceptance suite. Each test covers one criterion end to end and prints
//! one `criterion N (...): PASS` line (visible with `--nocapture`); a
//! failure prints FAIL before panicking.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigUint;

use cpwl2relu_core::bounds::{
    binomial, phi, prior_bound_he, prior_bound_hertrich, piece_bounds, component_piece_bounds_u64,
    component_bounds,
};
use cpwl2relu_core::builders::{
    ceil_log2_u64, compose, concat, extremum_network, identity_network, r_sequence, ExtremumKind,
};
use cpwl2relu_core::compiler::{compile, find_distinct_components};
use cpwl2relu_core::generate::{gen_1d, gen_1d_in_dim, gen_maxmin};
use cpwl2relu_core::geometry::AffineMap;
use cpwl2relu_core::linalg::Matrix;
use cpwl2relu_core::rat::Rat;
use cpwl2relu_core::regions::regions_from_network;
use cpwl2relu_core::relunet::{Layer, ReluNetwork};
use cpwl2relu_core::verify::verify_equivalence;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn criterion<F: FnOnce()>(number: u32, name: &str, body: F) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => println!("criterion {number} ({name}): PASS in {elapsed:.2}s"),
        Err(panic) => {
            println!("criterion {number} ({name}): FAIL in {elapsed:.2}s");
            std::panic::resume_unwind(panic);
        }
    }
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    let numer = (rng.next_u64() % 17) as i64 - 8;
    let denom = (rng.next_u64() % 4) as i64 + 1;
    Rat::new(numer, denom)
}

fn random_maps(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<AffineMap> {
    (0..m)
        .map(|_| {
            let gradient = (0..n).map(|_| small_rat(rng)).collect();
            AffineMap::new(gradient, small_rat(rng))
        })
        .collect()
}

#[test]
fn criterion_1_bound_tables() {
    criterion(1, "bound-table reproduction", || {
        for (q, h) in [(2u64, 11u32), (3, 44), (4, 57), (5, 150)] {
            assert_eq!(piece_bounds(q).hidden, BigUint::from(h), "theorem 1, q={q}");
        }
        for (k, h) in [(2u64, 11u32), (3, 57), (4, 108)] {
            assert_eq!(component_bounds(1, k).hidden, BigUint::from(h), "theorem 3, n=1 k={k}");
        }
        assert_eq!(component_bounds(2, 3).hidden, BigUint::from(95u32));
    });
}

#[test]
fn criterion_2_prior_bounds() {
    criterion(2, "prior-bound reproduction", || {
        assert_eq!(prior_bound_he(1, 2, 2), BigUint::from(16u32));
        assert_eq!(prior_bound_he(1, 3, 3), BigUint::from(2048u32));
        assert_eq!(prior_bound_he(1, 3, 6), BigUint::from(1048576u32));
        assert_eq!(prior_bound_hertrich(1, 2), BigUint::from(128u32));
        assert_eq!(prior_bound_hertrich(1, 3), BigUint::from(1458u32));
        assert_eq!(prior_bound_hertrich(2, 3), BigUint::from(43046721u32));
    });
}

#[test]
fn criterion_3_r_sequence() {
    criterion(3, "r-sequence suite", || {
        assert_eq!(r_sequence(1), 0);
        assert_eq!(r_sequence(2), 3);
        assert_eq!(r_sequence(3), 8);
        let mut previous = r_sequence(1);
        for k in 2..=2048u64 {
            let r = r_sequence(k);
            assert!(r > previous, "monotonicity fails at k={k}");
            previous = r;
            let cap = 3 * ((1u64 << ceil_log2_u64(k)) - 1);
            assert!(r <= cap, "r({k}) = {r} exceeds 3(2^ceil(log2 k) - 1) = {cap}");
            assert!(cap < 6 * k - 3, "cap bound fails at k={k}");
        }
    });
}

#[test]
fn criterion_4_extremum_equivalence() {
    criterion(4, "extremum-network equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xE);
        for case in 0..200usize {
            let m = (rng.next_u64() % 16) as usize + 1;
            let n = (rng.next_u64() % 8) as usize + 1;
            let kind = if case % 2 == 0 { ExtremumKind::Max } else { ExtremumKind::Min };
            let maps = random_maps(&mut rng, m, n);
            let net = extremum_network(&maps, kind).unwrap();

            let stats = net.stats();
            assert_eq!(stats.depth as u64, ceil_log2_u64(m as u64) + 1);
            assert_eq!(stats.hidden_neurons as u64, r_sequence(m as u64));
            let expected_width = if m > 1 { (3 * m).div_ceil(2) } else { 0 };
            assert_eq!(stats.max_width, expected_width);

            for _ in 0..100 {
                let x: Vec<Rat> = (0..n).map(|_| small_rat(&mut rng)).collect();
                let values = maps.iter().map(|f| f.eval(&x));
                let expected = match kind {
                    ExtremumKind::Max => values.max(),
                    ExtremumKind::Min => values.min(),
                }
                .unwrap();
                assert_eq!(net.evaluate(&x).unwrap()[0], expected, "case {case}");
            }
        }
    });
}

#[test]
fn criterion_5_builder_size_formulas() {
    criterion(5, "builder size formulas", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5);
        for n in 1..=6usize {
            for l in 1..=6usize {
                let id = identity_network(n, l);
                let stats = id.stats();
                assert_eq!(stats.depth, l);
                assert_eq!(stats.hidden_neurons, 2 * n * (l - 1));
                assert_eq!(stats.max_width, if l > 1 { 2 * n } else { 0 });
            }
        }
        for case in 0..100usize {
            let n = (rng.next_u64() % 3) as usize + 1;
            let m1 = (rng.next_u64() % 6) as usize + 1;
            let m2 = (rng.next_u64() % 6) as usize + 1;
            let g1 = extremum_network(&random_maps(&mut rng, m1, n), ExtremumKind::Max).unwrap();
            let g2 = extremum_network(&random_maps(&mut rng, m2, 1), ExtremumKind::Min).unwrap();
            let composed = compose(&g1, &g2).unwrap();
            assert_eq!(composed.depth(), g1.depth() + g2.depth() - 1, "case {case}");
            assert_eq!(
                composed.stats().hidden_neurons,
                g1.stats().hidden_neurons + g2.stats().hidden_neurons
            );
            assert!(
                composed.stats().max_width
                    <= g1.stats().max_width.max(g2.stats().max_width).max(1)
            );

            let m3 = (rng.next_u64() % 6) as usize + 1;
            let g3 = extremum_network(&random_maps(&mut rng, m3, n), ExtremumKind::Min).unwrap();
            let stacked = concat(&[g1.clone(), g3.clone()]).unwrap();
            let depth = g1.depth().max(g3.depth());
            assert_eq!(stacked.depth(), depth);
            let expected_hidden: usize = [&g1, &g3]
                .iter()
                .map(|g| g.stats().hidden_neurons + 2 * g.output_dim() * (depth - g.depth()))
                .sum();
            assert_eq!(stacked.stats().hidden_neurons, expected_hidden, "case {case}");
            let width_bound: usize = [&g1, &g3]
                .iter()
                .map(|g| g.stats().max_width.max(2 * g.output_dim()))
                .sum();
            assert!(stacked.stats().max_width <= width_bound, "case {case}");
        }
    });
}

#[test]
fn criterion_6_compiler_contract() {
    criterion(6, "compiler contract", || {
        for seed in 0..50u64 {
            let q = (seed % 32) as usize + 1;
            let inst = gen_1d(q, seed);
            let compiled = compile(&inst).unwrap();
            let report = verify_equivalence(&inst, &compiled, 8, seed).unwrap();
            assert!(report.passed(), "gen_1d seed {seed}: {:?}", report.mismatch);
            let comps = find_distinct_components(&inst).unwrap();
            let bound = component_piece_bounds_u64(comps.k() as u64, inst.q() as u64).unwrap();
            assert!(
                bound.admits(&compiled.stats()),
                "gen_1d seed {seed}: stats {:?} exceed {:?}",
                compiled.stats(),
                bound
            );
        }
        for seed in 0..20u64 {
            let k = (seed % 4) as usize + 2;
            let inst = gen_maxmin(2, k, seed).unwrap();
            let compiled = compile(&inst).unwrap();
            let report = verify_equivalence(&inst, &compiled, 8, seed).unwrap();
            assert!(report.passed(), "gen_maxmin seed {seed}: {:?}", report.mismatch);
            let comps = find_distinct_components(&inst).unwrap();
            let bound = component_piece_bounds_u64(comps.k() as u64, inst.q() as u64).unwrap();
            assert!(bound.admits(&compiled.stats()), "gen_maxmin seed {seed}");
        }
    });
}

#[test]
fn criterion_7_round_trip() {
    criterion(7, "round trip", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x77);
        for case in 0..20usize {
            // Random scalar net on R^2 with at most 8 ReLUs in 1-2 layers.
            let relus = (rng.next_u64() % 6) as usize + 3;
            let net = random_net(&mut rng, 2, relus);
            let inst = regions_from_network(&net).unwrap();
            let compiled = compile(&inst).unwrap();
            let per_piece = 1000usize.div_ceil(inst.q());
            let report = verify_equivalence(&inst, &compiled, per_piece, case as u64).unwrap();
            assert!(report.passed(), "case {case}: {:?}", report.mismatch);
            assert!(report.points_checked >= 1000, "case {case}");
            // Also compare the compiled network against the original one
            // directly, anywhere in the plane.
            for _ in 0..50 {
                let x: Vec<Rat> = (0..2).map(|_| small_rat(&mut rng)).collect();
                assert_eq!(
                    net.evaluate(&x).unwrap(),
                    compiled.evaluate(&x).unwrap(),
                    "case {case} at {x:?}"
                );
            }
        }
    });
}

#[test]
fn criterion_8_zaslavsky_phi_consistency() {
    criterion(8, "Zaslavsky and phi consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x2A);
        for case in 0..50usize {
            let n = (rng.next_u64() % 3) as usize + 1;
            let m = (rng.next_u64() % 9) as usize;
            let mut hyperplanes = Vec::with_capacity(m);
            while hyperplanes.len() < m {
                let gradient: Vec<Rat> = (0..n).map(|_| small_rat(&mut rng)).collect();
                if gradient.iter().all(Rat::is_zero) {
                    continue;
                }
                hyperplanes.push(AffineMap::new(gradient, small_rat(&mut rng)));
            }
            let cells =
                cpwl2relu_core::arrangement::enumerate_cells(&hyperplanes, n).unwrap();
            let bound: BigUint = (0..=n as u64).map(|i| binomial(m as u64, i)).sum();
            assert!(
                BigUint::from(cells.len()) <= bound,
                "case {case}: {} cells over bound {bound}",
                cells.len()
            );
        }
        for seed in 0..10u64 {
            let k = (seed % 4) as usize + 2;
            let inst = gen_maxmin(2, k, seed).unwrap();
            let comps = find_distinct_components(&inst).unwrap();
            let k_discovered = comps.k() as u64;
            let q = inst.q() as u64;
            assert!(k_discovered <= q, "seed {seed}");
            assert!(BigUint::from(q) <= phi(2, k_discovered), "seed {seed}");
        }
    });
}

#[test]
fn criterion_9_runtime_envelope() {
    criterion(9, "runtime envelope", || {
        let inst = gen_1d_in_dim(32, 100, 0);
        let start = Instant::now();
        let compiled = compile(&inst).unwrap();
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs() <= 60,
            "compile took {:.1}s, over the 60s envelope",
            elapsed.as_secs_f64()
        );
        // Light sanity check that the artifact is usable, outside the timer.
        let report = verify_equivalence(&inst, &compiled, 1, 9).unwrap();
        assert!(report.passed());
    });
}

fn random_net(rng: &mut ChaCha8Rng, inputs: usize, relus: usize) -> ReluNetwork {
    let split = relus.min(1 + (rng.next_u64() % relus as u64) as usize);
    let widths: Vec<usize> = if relus - split == 0 {
        vec![split]
    } else {
        vec![split, relus - split]
    };
    let mut layers = Vec::new();
    let mut fan_in = inputs;
    for w in &widths {
        layers.push(random_layer(rng, *w, fan_in));
        fan_in = *w;
    }
    layers.push(random_layer(rng, 1, fan_in));
    ReluNetwork::new(inputs, layers).unwrap()
}

fn random_layer(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Layer {
    let data: Vec<Vec<Rat>> = (0..rows)
        .map(|_| (0..cols).map(|_| small_rat(rng)).collect())
        .collect();
    let bias: Vec<Rat> = (0..rows).map(|_| small_rat(rng)).collect();
    Layer::new(Matrix::from_rows(data).unwrap(), bias).unwrap()
}
