//! Command-line surface: catalog queries, Hamiltonian-structure verification
//! of user-supplied fields, simulation with conservation reports, and
//! transport experiments. All reports echo their full configuration and are
//! byte-identical across runs (the timestamp can be suppressed).
//!
//! Exit codes are a stable contract: 0 success, 2 usage, 3 proven
//! obstruction, 4 inconclusive, 5 integration abort, 6 relatedness failure.

mod report;
mod run;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_OBSTRUCTION: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;
pub const EXIT_ABORT: u8 = 5;
pub const EXIT_NOT_RELATED: u8 = 6;

#[derive(Parser)]
#[command(
    name = "lieplane",
    about = "Lie algebras of planar vector fields: classification, Hamiltonian structure, simulation, transport",
    version
)]
struct Cli {
    /// Plain-text key=value config file; command-line flags win.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Suppress the timestamp field so reports are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Seed for all randomized equivalence sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Query the classification of planar Lie algebras.
    Catalog {
        #[command(subcommand)]
        what: CatalogCmd,
    },
    /// Run the Hamiltonian-structure pipeline on user-supplied fields.
    Verify(VerifyArgs),
    /// Integrate a named system and report conservation data.
    Simulate(SimulateArgs),
    /// Transport a solution through one of the shipped diffeomorphisms.
    Transport(TransportArgs),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List entry ids.
    List {
        #[arg(long)]
        hamiltonian_only: bool,
        #[arg(long)]
        primitive_only: bool,
        #[arg(long)]
        min_dim: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Show one entry, optionally at overridden parameters.
    Show {
        id: String,
        /// Repeatable key=value (alpha=..., r=..., eta=f1;f2, xi=...).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        json: bool,
        /// Also run the verification suite on the entry.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Vector field as "x-component;y-component" (repeatable).
    #[arg(long = "fields", value_name = "XEXPR;YEXPR", required = true)]
    fields: Vec<String>,
    /// Indices of the modular generating system, comma-separated.
    #[arg(long)]
    generators: Option<String>,
    /// Extra integrating-factor ansatz factors, comma-separated expressions.
    #[arg(long)]
    ansatz: Option<String>,
    /// Base point for the Hamiltonian line integral.
    #[arg(long, default_value = "0,1")]
    base: String,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// System name: riccati, milne-pinney|mp, kummer-schwarz|ks, buchdahl,
    /// lotka-volterra|lv, slv, slv2, slv3, viral.
    system: String,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Coefficient expressions in t, e.g. --coeff "w2=sin(t)".
    #[arg(long = "coeff", value_name = "NAME=EXPR")]
    coeffs: Vec<String>,
    #[arg(long, value_name = "X,Y")]
    x0: String,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long)]
    t1: f64,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Cap on the step size; defaults to (t1 - t0)/10.
    #[arg(long)]
    max_step: Option<f64>,
    /// Dense-output sample count.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Significant digits in the CSV (up to 17).
    #[arg(long, default_value_t = 6)]
    precision: usize,
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct TransportArgs {
    /// Source system: ks, riccati, or mp (for identity self-transport).
    #[arg(long)]
    from: String,
    /// Target system: mp.
    #[arg(long)]
    to: String,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long = "coeff", value_name = "NAME=EXPR")]
    coeffs: Vec<String>,
    #[arg(long, value_name = "X,Y")]
    x0: String,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 2.0)]
    t1: f64,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    /// Pass threshold on the max relative deviation.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let mut raw: Vec<String> = std::env::args().collect();
    // apply config-file defaults (flags win) before clap parses
    if let Some(path) = config_path(&raw) {
        match run::merge_config(&mut raw, &path) {
            Ok(()) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/usage itself; exit 0 for --help, 2 otherwise
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = run::Context {
        no_timestamp: cli.no_timestamp,
        seed: cli.seed,
    };
    let code = match cli.command {
        Command::Catalog { what } => match what {
            CatalogCmd::List {
                hamiltonian_only,
                primitive_only,
                min_dim,
                max_dim,
                json,
            } => run::catalog_list(&ctx, hamiltonian_only, primitive_only, min_dim, max_dim, json),
            CatalogCmd::Show {
                id,
                params,
                json,
                verify,
            } => run::catalog_show(&ctx, &id, &params, json, verify),
        },
        Command::Verify(args) => run::verify(
            &ctx,
            &args.fields,
            args.generators.as_deref(),
            args.ansatz.as_deref(),
            &args.base,
            args.json.as_deref(),
        ),
        Command::Simulate(args) => run::simulate(
            &ctx,
            &args.system,
            &args.params,
            &args.coeffs,
            &args.x0,
            args.t0,
            args.t1,
            args.rtol,
            args.atol,
            args.max_step,
            args.samples,
            args.precision,
            args.csv.as_deref(),
            args.json.as_deref(),
        ),
        Command::Transport(args) => run::transport(
            &ctx,
            &args.from,
            &args.to,
            &args.params,
            &args.coeffs,
            &args.x0,
            args.t0,
            args.t1,
            args.rtol,
            args.tol,
            args.samples,
            args.json.as_deref(),
        ),
    };
    ExitCode::from(code)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = a.strip_prefix("--config=") {
            return Some(rest.to_string());
        }
    }
    None
}
