//! Command implementations. Human-readable reports go to stderr, payloads
//! (JSON, CSV) to stdout or the requested file, so commands compose in
//! pipelines. Exit codes: 0 success, 1 environment or usage problems,
//! 2 semantic failures (invalid instances, failed verification).

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use cpwl2relu_core::bounds::{
    factorial, phi, prior_bound_hertrich, piece_bounds, component_piece_bounds, component_bounds,
    BoundTriple,
};
use cpwl2relu_core::compiler::{compile_with_details, find_distinct_components, validate};
use cpwl2relu_core::generate::{gen_1d_in_dim, gen_maxmin};
use cpwl2relu_core::rat::Rat;
use cpwl2relu_core::regions::regions_from_network;
use cpwl2relu_core::relunet::{Layer, NetStats, ReluNetwork};
use cpwl2relu_core::verify::verify_equivalence;
use cpwl2relu_core::{Error as CoreError, linalg::Matrix};

use crate::bench;
use crate::formats;

pub enum CliError {
    /// I/O, parse, or flag problems; exit code 1.
    Env(String),
    /// The inputs were readable but wrong: validation or verification
    /// failures; exit code 2.
    Semantic(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Env(_) => 1,
            CliError::Semantic(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Env(m) | CliError::Semantic(m) => write!(f, "{m}"),
        }
    }
}

type CliResult = Result<(), CliError>;

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| CliError::Env(format!("reading stdin: {e}")))?;
            Ok(buffer)
        }
        Some(p) if p.as_os_str() == "-" => read_input(None),
        Some(p) => {
            fs::read_to_string(p).map_err(|e| CliError::Env(format!("{}: {e}", p.display())))
        }
    }
}

fn write_output(path: Option<&Path>, payload: &str) -> CliResult {
    match path {
        None => {
            print!("{payload}");
            Ok(())
        }
        Some(p) if p.as_os_str() == "-" => {
            print!("{payload}");
            Ok(())
        }
        Some(p) => {
            fs::write(p, payload).map_err(|e| CliError::Env(format!("{}: {e}", p.display())))
        }
    }
}

fn stats_line(stats: &NetStats) -> String {
    format!(
        "depth={} width={} hidden={}",
        stats.depth, stats.max_width, stats.hidden_neurons
    )
}

fn bound_line(bound: &BoundTriple) -> String {
    format!(
        "depth={} width={} hidden={}",
        bound.layers, bound.max_width, bound.hidden
    )
}

pub fn run_gen(
    q: usize,
    n: usize,
    maxmin: bool,
    k: usize,
    seed: u64,
    output: Option<PathBuf>,
) -> CliResult {
    let inst = if maxmin {
        if n > 3 {
            return Err(CliError::Env(format!(
                "max-min generation supports n <= 3, got {n}"
            )));
        }
        gen_maxmin(n, k, seed).map_err(|e| CliError::Env(e.to_string()))?
    } else {
        if q == 0 || n == 0 {
            return Err(CliError::Env("q and n must be positive".into()));
        }
        gen_1d_in_dim(q, n, seed)
    };
    write_output(output.as_deref(), &formats::instance_to_json(&inst))
}

pub fn run_compile(
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    check_samples: usize,
    seed: u64,
) -> CliResult {
    let text = read_input(input.as_deref())?;
    let inst = formats::instance_from_json(&text)
        .map_err(|e| CliError::Env(format!("instance: {e}")))?;

    let report = validate(&inst, check_samples, seed);
    if !report.passed() {
        for violation in &report.violations {
            eprintln!("validation: {violation}");
        }
        return Err(CliError::Semantic(format!(
            "instance failed validation with {} violation(s)",
            report.violations.len()
        )));
    }

    let compiled = compile_with_details(&inst).map_err(|e| CliError::Semantic(e.to_string()))?;
    let k = compiled.components.k() as u64;
    let q = inst.q() as u64;
    let bound = component_piece_bounds(&BigUint::from(k), &BigUint::from(q))
        .expect("k <= q for compiled instances");
    eprintln!("pieces: {q}");
    eprintln!("components: {k}");
    eprintln!("realized: {}", stats_line(&compiled.network.stats()));
    eprintln!("bound: {}", bound_line(&bound));
    write_output(output.as_deref(), &formats::network_to_json(&compiled.network))
}

pub fn run_verify(
    instance: PathBuf,
    network: Option<PathBuf>,
    samples: usize,
    seed: u64,
) -> CliResult {
    let inst = formats::instance_from_json(&read_input(Some(&instance))?)
        .map_err(|e| CliError::Env(format!("instance: {e}")))?;
    let net = formats::network_from_json(&read_input(network.as_deref())?)
        .map_err(|e| CliError::Env(format!("network: {e}")))?;
    let report = verify_equivalence(&inst, &net, samples, seed)
        .map_err(|e| CliError::Env(e.to_string()))?;
    match report.mismatch {
        None => {
            eprintln!("verified: {} points, exact match", report.points_checked);
            Ok(())
        }
        Some(m) => {
            let point: Vec<String> = m.point.iter().map(Rat::to_string).collect();
            Err(CliError::Semantic(format!(
                "mismatch at [{}]: function gives {}, network gives {}",
                point.join(", "),
                m.expected,
                m.actual
            )))
        }
    }
}

// ---- bounds tables ----

pub enum SweepAxis {
    Pieces,
    Components,
}

pub struct Sweep {
    pub axis: SweepAxis,
    pub lo: u64,
    pub hi: u64,
}

pub fn parse_sweep(text: &str) -> Result<Sweep, CliError> {
    let parse = |axis, rest: &str| -> Result<Sweep, CliError> {
        let (lo, hi) = rest
            .split_once("..")
            .ok_or_else(|| CliError::Env(format!("bad sweep range {rest:?}; want LO..HI")))?;
        let lo: u64 = lo
            .parse()
            .map_err(|_| CliError::Env(format!("bad sweep bound {lo:?}")))?;
        let hi: u64 = hi
            .parse()
            .map_err(|_| CliError::Env(format!("bad sweep bound {hi:?}")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::Env(format!("empty sweep range {lo}..{hi}")));
        }
        Ok(Sweep { axis, lo, hi })
    };
    match text.split_once('=') {
        Some(("q", rest)) => parse(SweepAxis::Pieces, rest),
        Some(("k", rest)) => parse(SweepAxis::Components, rest),
        _ => Err(CliError::Env(format!(
            "bad sweep {text:?}; want q=LO..HI or k=LO..HI"
        ))),
    }
}

struct BoundRow {
    n: u64,
    k: u64,
    q: BigUint,
    ours: BoundTriple,
    he: Option<BigUint>,
    hertrich: Option<BigUint>,
}

/// Exponent cap beyond which comparator columns print `-` instead of a
/// number with thousands of digits.
const MAX_COMPARATOR_BITS: u64 = 4096;

fn he_capped(n: u64, k: u64, q: &BigUint) -> Option<BigUint> {
    let mut exponent = BigUint::from(k) * q;
    if k > n {
        exponent += BigUint::from((n + 1) * (k - n - 1));
    }
    if exponent > BigUint::from(MAX_COMPARATOR_BITS) {
        return None;
    }
    let shift = u64::try_from(exponent).ok()?;
    Some(BigUint::from(n) << usize::try_from(shift).ok()?)
}

fn hertrich_capped(n: u64, k: u64) -> Option<BigUint> {
    let e = 2 * n * n + 3 * n + 1;
    let bits_estimate = e * (64 - u64::leading_zeros(k.max(1)) as u64);
    if bits_estimate > 4 * MAX_COMPARATOR_BITS {
        return None;
    }
    Some(prior_bound_hertrich(n, k))
}

/// `he_q` is the piece count the comparator assumes: the actual `q` when
/// one was given, `k!` when only the component count is known.
fn bound_row(n: u64, k: u64, q: BigUint, he_q: &BigUint, ours: BoundTriple) -> BoundRow {
    let he = he_capped(n, k, he_q);
    let hertrich = hertrich_capped(n, k);
    BoundRow {
        n,
        k,
        q,
        ours,
        he,
        hertrich,
    }
}

pub fn run_bounds(
    q: Option<u64>,
    k: Option<u64>,
    n_list: &[u64],
    sweep: Option<Sweep>,
    format: &str,
) -> CliResult {
    let mut rows: Vec<BoundRow> = Vec::new();
    match (&sweep, q, k) {
        (Some(sweep), _, _) => {
            for &n in n_list {
                for value in sweep.lo..=sweep.hi {
                    match sweep.axis {
                        SweepAxis::Pieces => {
                            let q = BigUint::from(value);
                            let he_q = q.clone();
                            rows.push(bound_row(n, value, q, &he_q, piece_bounds(value)));
                        }
                        SweepAxis::Components => {
                            let q = phi(n, value);
                            let he_q = factorial(value);
                            rows.push(bound_row(n, value, q, &he_q, component_bounds(n, value)));
                        }
                    }
                }
            }
        }
        (None, None, None) => {
            return Err(CliError::Env(
                "nothing to print; pass --q, --k, or --sweep".into(),
            ));
        }
        (None, Some(q), None) => {
            for &n in n_list {
                let qb = BigUint::from(q);
                let he_q = qb.clone();
                rows.push(bound_row(n, q, qb, &he_q, piece_bounds(q)));
            }
        }
        (None, None, Some(k)) => {
            for &n in n_list {
                let q = phi(n, k);
                let he_q = factorial(k);
                rows.push(bound_row(n, k, q, &he_q, component_bounds(n, k)));
            }
        }
        (None, Some(q), Some(k)) => {
            if k > q {
                return Err(CliError::Env(format!(
                    "contradictory flags: k = {k} exceeds q = {q}"
                )));
            }
            let ours = component_piece_bounds(&BigUint::from(k), &BigUint::from(q))
                .map_err(|e| CliError::Env(e.to_string()))?;
            for &n in n_list {
                let qb = BigUint::from(q);
                let he_q = qb.clone();
                rows.push(bound_row(n, k, qb, &he_q, ours.clone()));
            }
        }
    }

    let opt = |v: &Option<BigUint>| v.as_ref().map_or_else(|| "-".into(), BigUint::to_string);
    match format {
        "table" => {
            println!(
                "{:>4} {:>6} {:>22} {:>6} {:>14} {:>14} {:>24} {:>24}",
                "n", "k", "q", "layers", "width", "hidden", "he2020", "hertrich2021"
            );
            for r in rows {
                println!(
                    "{:>4} {:>6} {:>22} {:>6} {:>14} {:>14} {:>24} {:>24}",
                    r.n,
                    r.k,
                    r.q.to_string(),
                    r.ours.layers,
                    r.ours.max_width.to_string(),
                    r.ours.hidden.to_string(),
                    opt(&r.he),
                    opt(&r.hertrich)
                );
            }
            Ok(())
        }
        "csv" => {
            println!("n,k,q,layers,width,hidden,he2020,hertrich2021");
            for r in rows {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    r.n,
                    r.k,
                    r.q,
                    r.ours.layers,
                    r.ours.max_width,
                    r.ours.hidden,
                    opt(&r.he),
                    opt(&r.hertrich)
                );
            }
            Ok(())
        }
        "json" => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "n": r.n,
                        "k": r.k,
                        "q": r.q.to_string(),
                        "layers": r.ours.layers,
                        "width": r.ours.max_width.to_string(),
                        "hidden": r.ours.hidden.to_string(),
                        "he2020": r.he.as_ref().map(BigUint::to_string),
                        "hertrich2021": r.hertrich.as_ref().map(BigUint::to_string),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&items).expect("serializable")
            );
            Ok(())
        }
        other => Err(CliError::Env(format!(
            "unknown format {other:?}; want table, csv, or json"
        ))),
    }
}

// ---- round trip ----

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    let numer = (rng.next_u64() % 17) as i64 - 8;
    let denom = (rng.next_u64() % 4) as i64 + 1;
    Rat::new(numer, denom)
}

fn random_layer(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Layer {
    let data: Vec<Vec<Rat>> = (0..rows)
        .map(|_| (0..cols).map(|_| small_rat(rng)).collect())
        .collect();
    let bias: Vec<Rat> = (0..rows).map(|_| small_rat(rng)).collect();
    Layer::new(Matrix::from_rows(data).expect("aligned"), bias).expect("aligned")
}

fn random_net(rng: &mut ChaCha8Rng, inputs: usize, relus: usize) -> ReluNetwork {
    let first = relus.div_ceil(2).max(1);
    let widths: Vec<usize> = if relus <= 3 || relus - first == 0 {
        vec![relus]
    } else {
        vec![first, relus - first]
    };
    let mut layers = Vec::new();
    let mut fan_in = inputs;
    for w in &widths {
        layers.push(random_layer(rng, *w, fan_in));
        fan_in = *w;
    }
    layers.push(random_layer(rng, 1, fan_in));
    ReluNetwork::new(inputs, layers).expect("conforming shapes")
}

pub fn run_roundtrip(seed: u64, relus: usize, n: usize, points: usize) -> CliResult {
    if relus == 0 || n == 0 {
        return Err(CliError::Env("relus and n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_net(&mut rng, n, relus);

    let stage = |name: &str, e: CoreError| CliError::Env(format!("stage {name}: {e}"));
    let inst = regions_from_network(&net).map_err(|e| stage("regions", e))?;
    let comps = find_distinct_components(&inst).map_err(|e| stage("components", e))?;
    let compiled = compile_with_details(&inst)
        .map_err(|e| CliError::Semantic(format!("stage compile: {e}")))?;

    let q = inst.q() as u64;
    let k = comps.k() as u64;
    let bound =
        component_piece_bounds(&BigUint::from(k), &BigUint::from(q)).expect("k <= q by construction");
    println!("pieces: {q}");
    println!("components: {k}");
    println!("realized: {}", stats_line(&compiled.network.stats()));
    println!("bound: {}", bound_line(&bound));

    let per_piece = points.div_ceil(inst.q());
    let report = verify_equivalence(&inst, &compiled.network, per_piece, seed)
        .map_err(|e| CliError::Semantic(format!("stage verify: {e}")))?;
    println!("points: {}", report.points_checked);
    match report.mismatch {
        None => {
            println!("roundtrip: PASS");
            Ok(())
        }
        Some(m) => {
            println!("roundtrip: FAIL");
            let point: Vec<String> = m.point.iter().map(Rat::to_string).collect();
            Err(CliError::Semantic(format!(
                "stage verify: mismatch at [{}]: function gives {}, network gives {}",
                point.join(", "),
                m.expected,
                m.actual
            )))
        }
    }
}

pub fn run_bench(
    q_list: &[usize],
    n_list: &[usize],
    trials: usize,
    seed: u64,
    output: Option<PathBuf>,
) -> CliResult {
    if q_list.is_empty() || n_list.is_empty() || trials == 0 {
        return Err(CliError::Env("empty benchmark configuration".into()));
    }
    if q_list.contains(&0) || n_list.contains(&0) {
        return Err(CliError::Env("q and n values must be positive".into()));
    }
    let records = bench::run(q_list, n_list, trials, seed);
    write_output(output.as_deref(), &bench::to_csv(&records))
}
