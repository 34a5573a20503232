//! `contact-assoc`: enumeration, duality, path-resampling chains, contact
//! process simulation and the correlation checks, driven from the command
//! line.
//!
//! Exit status: 0 when every check passes, 1 when a verification fails,
//! 2 on usage or input errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contact_assoc::scalar::{parse_exact, Exact};

use commands::InputError;
use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "contact-assoc", version, about = "Correlation checks for oriented planar percolation and the contact process")]
struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for report and CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact connection probabilities by enumerating all configurations.
    Enumerate {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sets: VertexSets,
    },
    /// Dual graph of a normalized spec under the pinned convention.
    Dual {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Runs the path-resampling chain on `{U → W}`.
    SampleMcmc {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        steps: u64,
        /// Defaults to ten sweeps over the edges.
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long, default_value_t = 1)]
        thin: u64,
    },
    /// Empirical joint law of the contact process at a fixed time, started
    /// from all sites infected.
    SimulateContact {
        #[command(flatten)]
        rates: Rates,
        #[arg(long, default_value_t = 50)]
        radius: i64,
        /// Comma-separated sites.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        targets: Vec<i64>,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        /// Sample the discrete diagram with this resolution instead.
        #[arg(short = 'N', long)]
        resolution: Option<u64>,
        /// Half-width of the discrete diagram; defaults to the radius.
        #[arg(long)]
        n: Option<i64>,
    },
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Positive association of `{X_e} ∪ {1 − Y_e}` given `{S ↛ T}`.
    Theorem3 {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sets: VertexSets,
        #[arg(long = "k", default_value_t = 3)]
        k_max: usize,
    },
    /// Positive association of the a/b indicators given `{U → W}`, on a spec
    /// or on the discrete diagram given by `--n` and `-N`.
    Theorem4 {
        #[arg(long, conflicts_with_all = ["n", "resolution"])]
        spec: Option<PathBuf>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(short = 'N', long)]
        resolution: Option<u64>,
        #[command(flatten)]
        rates: Rates,
        #[arg(long = "k", default_value_t = 3)]
        k_max: usize,
    },
    /// Negative correlation of the healthy blocks left and right of a
    /// surviving origin.
    Conjecture1 {
        #[command(flatten)]
        rates: Rates,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 50)]
        radius: i64,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        /// Exact mode on the discrete diagram with this resolution.
        #[arg(short = 'N', long)]
        resolution: Option<u64>,
    },
    /// Orientation-convention search; without `--spec` it runs the built-in suite.
    Duality {
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Write the constants file for the convention found.
        #[arg(long, value_name = "FILE")]
        emit_constants: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct VertexSets {
    /// Comma-separated vertex ids; defaults to the cycle's `U`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sources: Vec<i64>,
    /// Comma-separated vertex ids; defaults to the cycle's `W`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    targets: Vec<i64>,
}

#[derive(Args, Debug)]
struct Rates {
    #[arg(long, default_value = "1", value_parser = exact)]
    lambda: Exact,
    #[arg(long, default_value = "1", value_parser = exact)]
    delta: Exact,
    #[arg(long, default_value = "1", value_parser = exact)]
    t: Exact,
}

fn exact(s: &str) -> Result<Exact, String> {
    parse_exact(s).map_err(|e| e.to_string())
}

impl RunConfig {
    fn with_rates(mut self, r: &Rates) -> Self {
        self.lambda = Some(r.lambda.clone());
        self.delta = Some(r.delta.clone());
        self.t = Some(r.t.clone());
        self
    }
}

fn dispatch(cli: Cli) -> Result<bool, InputError> {
    let base = |name: &str| RunConfig::new(name, cli.seed, cli.out.clone());
    match cli.command {
        Command::Enumerate { spec, sets } => {
            let cfg = RunConfig { spec: Some(spec), ..base("enumerate") };
            commands::enumerate(&cfg, &sets.sources, &sets.targets)
        }
        Command::Dual { spec } => commands::dual(&RunConfig { spec: Some(spec), ..base("dual") }),
        Command::SampleMcmc { spec, steps, burn_in, thin } => {
            let cfg = RunConfig { spec: Some(spec), steps: Some(steps), burn_in, thin: Some(thin), ..base("sample-mcmc") };
            commands::sample_mcmc(&cfg)
        }
        Command::SimulateContact { rates, radius, targets, reps, resolution, n } => {
            let cfg = RunConfig { radius: Some(radius), reps: Some(reps), resolution, n, ..base("simulate-contact") }.with_rates(&rates);
            commands::simulate_contact(&cfg, &targets)
        }
        Command::Verify(Verify::Theorem3 { spec, sets, k_max }) => {
            let cfg = RunConfig { spec: Some(spec), k_max: Some(k_max), ..base("verify theorem3") };
            commands::theorem3(&cfg, &sets.sources, &sets.targets)
        }
        Command::Verify(Verify::Theorem4 { spec, n, resolution, rates, k_max }) => {
            let cfg = RunConfig { spec, n, resolution, k_max: Some(k_max), ..base("verify theorem4") };
            let cfg = if cfg.spec.is_some() { cfg } else { cfg.with_rates(&rates) };
            commands::theorem4(&cfg)
        }
        Command::Verify(Verify::Conjecture1 { rates, n, m, radius, reps, resolution }) => {
            let reps = resolution.is_none().then_some(reps);
            let cfg = RunConfig { n: Some(n), m: Some(m), radius: Some(radius), reps, resolution, ..base("verify conjecture1") }
                .with_rates(&rates);
            commands::conjecture1(&cfg)
        }
        Command::Verify(Verify::Duality { spec, emit_constants }) => {
            commands::duality(&RunConfig { spec, ..base("verify duality") }, emit_constants.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed; see the report for the offending instance");
            ExitCode::from(1)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
