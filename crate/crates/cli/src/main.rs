//! `simpalg`: command-line access to homotopy, André–Quillen homology,
//! cofiber, series, and audit computations.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use commands::MapKind;
use config::{CommonArgs, RunConfig};
use output::Report;
use simpalg_core::audit::AuditMode;

/// Environment variable with the worker thread count.
const THREADS_ENV: &str = "SIMPALG_THREADS";

#[derive(Parser, Debug)]
#[command(name = "simpalg", version, about = "Homotopy of simplicial commutative algebras by exact linear algebra")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Asymptotic,
    Empirical,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homotopy of the sphere algebra S(V, n), dim V = q
    PiSphere {
        #[arg(short)]
        q: usize,
        #[arg(short)]
        n: usize,
    },
    /// André–Quillen homology of S(V, n)
    HqSphere {
        #[arg(short)]
        q: usize,
        #[arg(short)]
        n: usize,
    },
    /// Homotopy of the Eilenberg–MacLane object K(V, n) by both chain functors
    Em {
        #[arg(short)]
        q: usize,
        #[arg(short)]
        n: usize,
    },
    /// Cofiber of a map of rational spheres S(m) -> S(n) by the bar construction
    Cofiber {
        #[arg(long, value_enum)]
        map: MapKind,
        /// Target sphere degree
        #[arg(short)]
        n: usize,
        /// Source sphere degree (zero map)
        #[arg(long)]
        source: Option<usize>,
        /// Power of the generator (power map)
        #[arg(short, default_value_t = 2)]
        s: usize,
    },
    /// The rational algebra A<r,s>: homotopy and André–Quillen tables
    RationalExample {
        #[arg(short)]
        r: usize,
        #[arg(short)]
        s: usize,
    },
    /// Poincaré series of a sphere algebra, optionally with the φ transform
    Series {
        #[arg(short)]
        q: usize,
        #[arg(short)]
        n: usize,
        /// Tabulate φ against q t^(n-1)/(n-1)!
        #[arg(long)]
        asymptotic: bool,
        /// Logarithm base for the transform in characteristic 0
        #[arg(long)]
        base: Option<u64>,
        /// Sample points
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0])]
        t: Vec<f64>,
    },
    /// Growth audit of an André–Quillen profile in positive characteristic
    Audit {
        /// Pairs degree:dim, comma separated
        #[arg(long, allow_hyphen_values = true)]
        profile: String,
        /// Bound D on the Poincaré series, or "unbounded"
        #[arg(long)]
        pi_bound: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Asymptotic)]
        mode: ModeArg,
        /// Sample points for the evaluation table
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Rational vanishing check on an André–Quillen profile
    RationalCheck {
        #[arg(long)]
        profile: String,
        /// Assert that the homotopy is finite
        #[arg(long)]
        pi_finite: bool,
    },
    /// Homotopy of a simplicial vector space given as JSON
    Homotopy {
        #[arg(long)]
        input: PathBuf,
    },
    /// Randomized objects with known homotopy, checked by both chain functors
    Check {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Report> {
    match &cli.command {
        Command::PiSphere { q, n } => commands::pi_sphere(cfg, *q, *n),
        Command::HqSphere { q, n } => commands::hq_sphere(cfg, *q, *n),
        Command::Em { q, n } => commands::em(cfg, *q, *n),
        Command::Cofiber { map, n, source, s } => commands::cofiber(cfg, *map, *n, *source, *s),
        Command::RationalExample { r, s } => commands::rational_example(cfg, *r, *s),
        Command::Series { q, n, asymptotic, base, t } => commands::series(cfg, *q, *n, *asymptotic, *base, t),
        Command::Audit { profile, pi_bound, mode, t } => {
            let mode = match mode {
                ModeArg::Asymptotic => AuditMode::Asymptotic,
                ModeArg::Empirical => AuditMode::Empirical,
            };
            commands::audit(cfg, profile, pi_bound, mode, t.as_deref())
        }
        Command::RationalCheck { profile, pi_finite } => commands::rational(cfg, profile, *pi_finite),
        Command::Homotopy { input } => commands::homotopy(cfg, input),
        Command::Check { count } => commands::check(cfg, *count),
    }
}

/// Exit code for a failed run: 2 for insufficient truncation, 3 for a
/// failed internal consistency check, 1 otherwise.
fn error_code(err: &anyhow::Error) -> u8 {
    use simpalg_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Truncation(_)) => 2,
        Some(Error::Mismatch(_)) => 3,
        _ => 1,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer"))?;
        if n == 0 {
            anyhow::bail!("{THREADS_ENV} must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| RunConfig::resolve(&cli.common)).and_then(|cfg| {
        let report = run(&cli, &cfg)?;
        Ok((report, cfg))
    });
    match result {
        Ok((report, cfg)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(cfg.output).as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}
