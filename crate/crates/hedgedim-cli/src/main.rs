//! `hedgedim` — classify rotation numbers, compute Brjuno/Herman reports,
//! sample post-critical orbits, fit Fatou charts, extract nested box
//! families and emit dimension bounds, all with reproducible provenance.

mod cmds;
mod numspec;

use clap::{Parser, Subcommand};

/// Exit codes: 0 ok, 1 usage, 2 numeric gate, 3 undetermined verdict.
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: 1,
            msg: msg.into(),
        }
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }
    pub fn undetermined(msg: impl Into<String>) -> Self {
        CliError {
            code: 3,
            msg: msg.into(),
        }
    }
}

#[derive(Parser)]
#[command(name = "hedgedim", version, about = "rotation-number arithmetic, dimension bounds, and near-parabolic dynamics")]
pub struct Cli {
    /// Working precision in bits (default: HEDGEDIM_PRECISION env, else 256
    /// for arithmetic commands and 128 for dynamics commands).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Rayon thread count (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    pub format: String,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Suppress the timestamp field (byte-identical reruns).
    #[arg(long, global = true, default_value_t = false)]
    pub no_timestamp: bool,
    /// Seed for any randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Full arithmetic classification of a rotation number.
    Classify {
        /// golden | sqrt2 | jagged-example | spiky-example | decimal |
        /// digits:<json> | @digits.json
        #[arg(long)]
        number: String,
        /// Expansion depth.
        #[arg(long)]
        depth: Option<usize>,
        /// High-type threshold N.
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 10)]
        p_max: usize,
        #[arg(long, default_value_t = 24)]
        brjuno_depth: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1e3)]
        bound: f64,
        /// Starting digit a0 for the named example rules (2 reproduces
        /// the commonly quoted rules but is non-canonical at level 0).
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Brjuno partial sums and verdict.
    Brjuno {
        #[arg(long)]
        number: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1e3)]
        bound: f64,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Herman-type test.
    Herman {
        #[arg(long)]
        number: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 10)]
        p_max: usize,
        #[arg(long, default_value_t = 24)]
        brjuno_depth: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Sample the forward orbit of the critical value.
    Orbit {
        /// Rotation number as a number spec (realized at --depth).
        #[arg(long)]
        number: String,
        #[arg(long, default_value = "q")]
        family: String,
        #[arg(long, default_value_t = 100_000)]
        points: usize,
        #[arg(long, default_value_t = 10.0)]
        escape_radius: f64,
        /// Retain full-precision coordinates in the binary output.
        #[arg(long, default_value_t = false)]
        full: bool,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Fit a perturbed Fatou coordinate and report its residuals.
    Fatou {
        #[arg(long)]
        number: String,
        #[arg(long, default_value = "q")]
        family: String,
        /// Iteration budget; pass twice for a comparison run.
        #[arg(long = "k", num_args = 1.., default_values_t = [2000usize])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Bottom of the fitted band in the lifted plane.
        #[arg(long, default_value_t = 1.0)]
        im_lo: f64,
        /// Write per-point Abel residuals (re_z, im_z, abel_residual).
        #[arg(long)]
        residual_csv: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Evaluate the chi lift on a grid and report the imaginary-part band.
    Chi {
        #[arg(long)]
        number: String,
        #[arg(long, default_value = "q")]
        family: String,
        #[arg(long, default_value_t = 2000)]
        k: usize,
        /// Lift parity: -1 holomorphic, +1 anti-holomorphic.
        #[arg(long, default_value_t = -1)]
        eps: i8,
        /// Grid: RE_LO,RE_HI,IM_LO,IM_HI,NX,NY in the Abel plane (imaginary
        /// parts in units of 1/alpha).
        #[arg(long, default_value = "1,9,10,50,10,10", allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Apply the renormalized return map around zero.
    Renorm {
        #[arg(long)]
        number: String,
        #[arg(long, default_value = "q")]
        family: String,
        #[arg(long, default_value_t = 2000)]
        k: usize,
        #[arg(long, default_value_t = 1e-6)]
        w_abs: f64,
        #[arg(long, default_value_t = 8)]
        directions: usize,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k_surrogate: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// Extract the nested family of occupied grid boxes from a point cloud.
    Nest {
        /// Point source: .csv (re,im rows) or .bin (orbit binary).
        #[arg(long)]
        points: String,
        /// Comma-separated decreasing scales.
        #[arg(long)]
        scales: String,
        /// Root box as X,Y,SIDE (default: padded bounding square).
        #[arg(long, allow_hyphen_values = true)]
        root: Option<String>,
    },
    /// Full dimension pipeline: nest extraction, lower bound, box counting.
    Dimension {
        /// Point source file; or use --number to sample an orbit.
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        number: Option<String>,
        #[arg(long, default_value = "q")]
        family: String,
        #[arg(long, default_value_t = 1_000_000)]
        orbit_points: usize,
        #[arg(long)]
        scales: Option<String>,
        #[arg(long, default_value_t = 5)]
        window: usize,
        /// Write per-scale counts (log_inv_scale, log_count).
        #[arg(long)]
        counts_csv: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3)]
        example_seed: u64,
    },
    /// The four-corner self-similar family: bound, martingale, Frostman.
    McmullenDemo {
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, default_value_t = 8)]
        materialize_depth: usize,
        #[arg(long, default_value_t = 0.9)]
        frostman_s: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cmds::run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.msg);
            std::process::exit(e.code);
        }
    }
}
