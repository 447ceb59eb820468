//! `latheta`: theta series, generalized theta series, norm hierarchies and
//! theta-ratio scans from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "latheta", version, about = "Exact lattice theta series and sublattice volume hierarchies")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Cap on vectors produced by one enumeration (overrides LATHETA_MAX_VECTORS).
    #[arg(long, global = true)]
    max_vectors: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct LatticeSource {
    /// Built-in lattice: zn:<n>, a2, d4, d4bar, a2_c1, a2_c2, a4_c3, a4_c4.
    #[arg(long)]
    lattice: Option<String>,

    /// Lattice JSON file with a rational Gram matrix.
    #[arg(long)]
    lattice_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct CodeSource {
    /// Built-in code: c1, c2 (binary) or c3, c4 (over Z_4).
    #[arg(long)]
    code: Option<String>,

    /// Code JSON file: {"q": 2, "n": 6, "generator": [[...], ...]}.
    #[arg(long)]
    code_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Theta series coefficients up to a squared-norm bound.
    Theta {
        #[command(flatten)]
        source: LatticeSource,
        /// Inclusive bound on the squared norm, e.g. 9 or 9/4.
        #[arg(long)]
        bound: String,
    },
    /// Generalized theta series of order r.
    Gts {
        #[command(flatten)]
        source: LatticeSource,
        #[arg(short = 'r', long = "rank")]
        r: usize,
        /// Number of terms.
        #[arg(short = 'm', long = "terms", default_value_t = 1)]
        m: usize,
        /// Only count vectors whose coefficients all satisfy |u_i| <= B.
        #[arg(long, value_name = "B")]
        coeff_box: Option<i64>,
    },
    /// Norm hierarchy nu_1..nu_n (minimum sublattice Gram determinants).
    Norms {
        #[command(flatten)]
        source: LatticeSource,
        /// Search every rank directly instead of using the dual lattice for r > n/2.
        #[arg(long)]
        no_duality: bool,
    },
    /// Stability verdict with a witness sublattice when unstable.
    Stable {
        #[command(flatten)]
        source: LatticeSource,
    },
    /// Theta series ratio over a log-spaced grid, with the extremum at tau ~ 1.
    Ratio {
        #[command(flatten)]
        source: LatticeSource,
        #[arg(long, default_value = "1/4")]
        from: String,
        #[arg(long, default_value = "4")]
        to: String,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Largest deviation |Delta(tau0 t) - Delta(tau0 / t)| over t in [1, 4].
    Symmetry {
        #[command(flatten)]
        source: LatticeSource,
        #[arg(long, default_value = "1")]
        tau0: String,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Weight enumerator and weight hierarchy of a binary code.
    Ghw {
        #[command(flatten)]
        source: CodeSource,
    },
    /// Construction A lattice of a code, as lattice JSON.
    Constructa {
        #[command(flatten)]
        source: CodeSource,
        /// Output file (default: standard output).
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Recompute every reference value and report PASS/FAIL.
    PaperRepro {
        /// Also compare non-leading second-order coefficients (reported as WARN).
        #[arg(long)]
        strict_gts_example3: bool,
        /// Same as --format json.
        #[arg(long)]
        json: bool,
        /// Seed for the randomised property checks.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(commands::EXIT_INPUT);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(commands::EXIT_INPUT);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
