//! Command-line surface: generate instances, compile them to networks,
//! verify equivalence, print bound tables, run the net-to-net round trip,
//! and benchmark compilation.

mod bench;
mod commands;
mod formats;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};


#[derive(Parser)]
#[command(
    name = "cpwl2relu",
    version,
    about = "Exact compilation of continuous piecewise linear functions into ReLU networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random CPWL instance (JSON to stdout or --output)
    Gen {
        /// Number of pieces for the 1D profile generator
        #[arg(long, default_value_t = 4)]
        q: usize,
        /// Input dimension
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Use the max-min lattice generator over --k random components
        #[arg(long)]
        maxmin: bool,
        /// Number of random components for --maxmin
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate an instance and compile it into a ReLU network
    Compile {
        /// Instance JSON ("-" or omitted for stdin)
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Network JSON destination ("-" or omitted for stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Random points for the coverage part of validation
        #[arg(long, default_value_t = 64)]
        check_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that a network computes an instance exactly
    Verify {
        /// Instance JSON path
        #[arg(long)]
        instance: PathBuf,
        /// Network JSON ("-" or omitted for stdin)
        #[arg(long)]
        network: Option<PathBuf>,
        /// Random points per piece, beyond the n+1 deterministic ones
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print size bounds next to the prior published bounds
    Bounds {
        /// Piece count
        #[arg(long)]
        q: Option<u64>,
        /// Component count
        #[arg(long)]
        k: Option<u64>,
        /// Input dimensions, comma separated (affects comparator columns)
        #[arg(long, default_value = "1", value_delimiter = ',')]
        n: Vec<u64>,
        /// Sweep one axis: "q=1..40" or "k=1..21"
        #[arg(long)]
        sweep: Option<String>,
        /// table, csv, or json
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Random net -> regions -> compile -> verify, end to end
    Roundtrip {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// ReLUs in the generated network (region extraction caps at 20)
        #[arg(long, default_value_t = 6)]
        relus: usize,
        /// Input dimension of the generated network
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Total verification points spread over the pieces
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Time compilation over a grid of piece counts and dimensions (CSV)
    Bench {
        /// Piece counts, comma separated
        #[arg(long, default_value = "1,2,4,8,16,32", value_delimiter = ',')]
        q_list: Vec<usize>,
        /// Input dimensions, comma separated
        #[arg(long, default_value = "1,10,100", value_delimiter = ',')]
        n_list: Vec<usize>,
        /// Trials per grid point; the CSV records the mean wall time
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination ("-" or omitted for stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let result = match cli.command {
        Command::Gen {
            q,
            n,
            maxmin,
            k,
            seed,
            output,
        } => commands::run_gen(q, n, maxmin, k, seed, output),
        Command::Compile {
            input,
            output,
            check_samples,
            seed,
        } => commands::run_compile(input, output, check_samples, seed),
        Command::Verify {
            instance,
            network,
            samples,
            seed,
        } => commands::run_verify(instance, network, samples, seed),
        Command::Bounds {
            q,
            k,
            n,
            sweep,
            format,
        } => match sweep.map(|s| commands::parse_sweep(&s)).transpose() {
            Ok(sweep) => commands::run_bounds(q, k, &n, sweep, &format),
            Err(e) => Err(e),
        },
        Command::Roundtrip {
            seed,
            relus,
            n,
            points,
        } => commands::run_roundtrip(seed, relus, n, points),
        Command::Bench {
            q_list,
            n_list,
            trials,
            seed,
            output,
        } => commands::run_bench(&q_list, &n_list, trials, seed, output),
    };

    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}
