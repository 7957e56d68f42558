//! Seeded compile-time benchmark. Each (pieces, dimension, trial) job
//! generates a fresh instance and times only the compilation call. Trials
//! may run on several worker threads; `CPWL2RELU_THREADS` caps the pool.
//! Records are merged by job index, so results are independent of
//! scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use cpwl2relu_core::compiler::compile;
use cpwl2relu_core::generate::gen_1d_in_dim;
use cpwl2relu_core::relunet::NetStats;

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub q: usize,
    pub n: usize,
    pub seconds: f64,
    pub stats: NetStats,
}

pub fn thread_cap() -> usize {
    match std::env::var("CPWL2RELU_THREADS") {
        Ok(v) => v.parse().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

fn job_seed(seed: u64, q: usize, n: usize, trial: usize) -> u64 {
    // splitmix-style mixing keeps per-job streams disjoint and reproducible
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(1 + q as u64))
        .wrapping_add(0xBF58476D1CE4E5B9u64.wrapping_mul(1 + n as u64))
        .wrapping_add(0x94D049BB133111EBu64.wrapping_mul(1 + trial as u64));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Runs `trials` compilations per (q, n) pair and reports the mean wall
/// time together with the realized statistics of the first trial's network.
pub fn run(q_list: &[usize], n_list: &[usize], trials: usize, seed: u64) -> Vec<BenchRecord> {
    let jobs: Vec<(usize, usize, usize)> = q_list
        .iter()
        .flat_map(|&q| {
            n_list
                .iter()
                .flat_map(move |&n| (0..trials).map(move |t| (q, n, t)))
        })
        .collect();
    let results: Mutex<Vec<Option<(f64, NetStats)>>> = Mutex::new(vec![None; jobs.len()]);
    let cursor = AtomicUsize::new(0);
    let workers = thread_cap().min(jobs.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                let Some(&(q, n, trial)) = jobs.get(idx) else {
                    break;
                };
                let inst = gen_1d_in_dim(q, n, job_seed(seed, q, n, trial));
                let start = Instant::now();
                let net = compile(&inst).expect("generated instances compile");
                let seconds = start.elapsed().as_secs_f64();
                results.lock().unwrap()[idx] = Some((seconds, net.stats()));
            });
        }
    });

    let results = results.into_inner().unwrap();
    let mut records = Vec::with_capacity(q_list.len() * n_list.len());
    for &q in q_list {
        for &n in n_list {
            let mut total = 0.0;
            let mut first_stats = None;
            for (idx, job) in jobs.iter().enumerate() {
                if job.0 == q && job.1 == n {
                    let (seconds, stats) = results[idx].expect("job ran");
                    total += seconds;
                    if job.2 == 0 {
                        first_stats = Some(stats);
                    }
                }
            }
            records.push(BenchRecord {
                q,
                n,
                seconds: total / trials as f64,
                stats: first_stats.expect("trial 0 ran"),
            });
        }
    }
    records
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("q,n,seconds,depth,width,hidden\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{:.6},{},{},{}\n",
            r.q, r.n, r.seconds, r.stats.depth, r.stats.max_width, r.stats.hidden_neurons
        ));
    }
    out
}
