use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rapsig::commands::{self, Format, Output};
use rapsig::scenario::Scenario;
use rapsig::settings::Settings;
use rapsig::CliResult;

/// Signature-based comparison of redundancy allocation policies.
#[derive(Parser)]
#[command(name = "rapsig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Positive points of the geometric evaluation grid
    #[arg(long, global = true, default_value_t = rapsig_core::grid::DEFAULT_POINTS)]
    grid_points: usize,
    /// Grid end (default: where every lifetime reliability is below 1e-8)
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Absolute MTTF tie tolerance
    #[arg(long, global = true, default_value_t = rapsig_core::engine::MTTF_TIE_TOL)]
    tol: f64,
    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 1_000_000)]
    mc_n: u64,
    /// Monte Carlo seed
    #[arg(long, global = true, default_value_t = Settings::default().seed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact signature of a system, by both algorithms
    Signature {
        system: PathBuf,
        /// Add one active spare on this component first
        #[arg(long)]
        spare_on: Option<usize>,
    },
    /// Reliability polynomial H and its diagonal h
    Polynomial {
        system: PathBuf,
        #[arg(long)]
        spare_on: Option<usize>,
    },
    /// Ḡ and F̄_T curves of every policy on the grid
    Gbar { scenario: PathBuf },
    /// Pairwise verdicts between the policies of a scenario
    Compare {
        scenario: PathBuf,
        /// Also write the curve CSV here
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Best component for a single spare
    Optimal { scenario: PathBuf },
    /// Reproduce the bridge allocation table (exit 3 on any mismatch)
    Table1,
    /// Mean time to failure of every policy
    Mttf { scenario: PathBuf },
    /// Monte Carlo cross-check of every policy (exit 3 on disagreement)
    McCheck { scenario: PathBuf },
}

fn run(cli: &Cli) -> CliResult<Output> {
    let o = &cli.opts;
    let settings = Settings { grid_points: o.grid_points, t_max: o.t_max, tol: o.tol, mc_n: o.mc_n, seed: o.seed, ..Settings::default() };
    settings.validate()?;
    let format = match o.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let load = |p: &PathBuf| Scenario::load(p, &settings.eval);
    match &cli.command {
        Command::Signature { system, spare_on } => commands::signature(&commands::load_system(system, *spare_on)?, format),
        Command::Polynomial { system, spare_on } => commands::polynomial(&commands::load_system(system, *spare_on)?, format),
        Command::Gbar { scenario } => commands::gbar(&load(scenario)?, &settings, format),
        Command::Compare { scenario, plot } => commands::compare_cmd(&load(scenario)?, &settings, format, plot.as_deref()),
        Command::Optimal { scenario } => commands::optimal(&load(scenario)?, &settings, format),
        Command::Table1 => commands::table1_cmd(&settings, format),
        Command::Mttf { scenario } => commands::mttf(&load(scenario)?, &settings, format),
        Command::McCheck { scenario } => commands::mc_check(&load(scenario)?, &settings, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors
            return if e.use_stderr() { ExitCode::from(rapsig::Failure::Input.exit_code()) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            match out.status {
                None => ExitCode::SUCCESS,
                Some(err) => {
                    eprintln!("rapsig: {err}");
                    err.exit_code()
                }
            }
        }
        Err(err) => {
            eprintln!("rapsig: {err}");
            err.exit_code()
        }
    }
}
