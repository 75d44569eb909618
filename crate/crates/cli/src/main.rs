//! `revlab`: command-line front end for the reversible-computation lab.
//!
//! Exit status is 0 on success or acceptance, 1 on rejection, a failed
//! verdict or a search that found nothing, and 2 on any error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "revlab",
    version,
    about = "Pebble games, reversible simulation and oracle chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pebble-game schedules and minimal-pebble search
    #[command(subcommand)]
    Pebble(PebbleCmd),
    /// Reversible simulation of seeded irreversible machines
    #[command(subcommand)]
    Sim(SimCmd),
    /// Chain oracles, the separator decider and the input ROM
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Pebble timelines and the compression argument
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Linear-space reversible search by Euler tour
    #[command(subcommand)]
    Euler(EulerCmd),
    /// Run any experiment and write its CSV report
    #[command(subcommand)]
    Report(ReportCmd),
}

/// Experiment parameters. Each overrides the same key from `--config`.
/// Lists take commas and inclusive ranges, e.g. `--k 2-4` or `--t 1,2,8`.
#[derive(Args, Default)]
pub struct Params {
    /// Key=value file applied before the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the CSV report here instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    /// Chain lengths
    #[arg(long)]
    pub t: Option<String>,
    /// Tree depths for the Euler-tour family
    #[arg(long)]
    pub depth: Option<String>,
    /// Node width S of oracle chains
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub seg_len: Option<String>,
    /// Configuration width of simulated machines
    #[arg(long)]
    pub width: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub width_cap: Option<String>,
    #[arg(long)]
    pub step_cap: Option<String>,
    /// One configuration in this many halts in random tables
    #[arg(long)]
    pub halt_every: Option<String>,
    /// Largest pebble budget tried by the search
    #[arg(long)]
    pub budget: Option<String>,
}

#[derive(Subcommand)]
enum PebbleCmd {
    /// Metrics of the Bennett(k, n) schedule
    Bennett {
        #[command(flatten)]
        params: Params,
        /// Print the move list of the first (k, n) instead of metrics
        #[arg(long)]
        moves: bool,
    },
    /// Fewest pebbles that reach node t
    Search {
        #[command(flatten)]
        params: Params,
        /// Print a shortest witness for the first t instead of metrics
        #[arg(long)]
        witness: bool,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Simulate along the Bennett schedule and compare with a direct run
    Bennett {
        #[command(flatten)]
        params: Params,
        /// Save the micro-op trace of the first trial
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Replay each run backwards and check the start state comes back
    Audit {
        #[command(flatten)]
        params: Params,
    },
}

/// Where a chain comes from: a chain file, or a seeded draw.
#[derive(Args)]
pub struct ChainArgs {
    /// Chain file written by `oracle build`
    #[arg(long)]
    pub chain: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub space: usize,
    #[arg(long, default_value_t = 8)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Draw a seeded chain and write it out
    Build {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decide the separator language for one chain (exit 0 accept, 1
    /// reject), or run the seeded check over many with `--trials`
    Separator {
        #[command(flatten)]
        chain: ChainArgs,
        /// Run this many seeded chains and report CSV
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write the ROM encoding of a chain; exit status follows its result bit
    Rom {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// A chain walked by a pebbling strategy: Bennett(k, n) by default, or
/// the moves in `--moves`.
#[derive(Args)]
pub struct RunArgs {
    /// Chain file; otherwise a seeded chain of length k^n
    #[arg(long)]
    pub chain: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 8)]
    pub space: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Move file, one `P j` or `U j` per line
    #[arg(long)]
    pub moves: Option<PathBuf>,
    /// Save the resulting trace
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Pebbled set at every query, or the derived move list with `--derive`
    Pebbles {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        derive: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write the description of the chain at time tau
    Compress {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        tau: u64,
        /// forward or backward; the majority direction when omitted
        #[arg(long)]
        direction: Option<String>,
        #[arg(long, short)]
        output: PathBuf,
        /// Print per-component sizes as CSV
        #[arg(long)]
        report_sizes: bool,
    },
    /// Rebuild the chain from a description; exit 1 if it differs
    Decompress {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report_sizes: bool,
    },
    /// Least string of a length that a description system cannot shorten
    Incompressible {
        #[command(flatten)]
        run: RunArgs,
        /// duplicate, zero, trace, initial or chain
        #[arg(long, default_value = "duplicate")]
        system: String,
        #[arg(long)]
        len: usize,
    },
}

/// A table file, or a generated machine.
#[derive(Args)]
pub struct TableArgs {
    /// Table file: `width=<bits> [initial=<hex>]`, then `<hex> -> <hex>`
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Complete binary in-tree of this depth
    #[arg(long)]
    pub depth: Option<u32>,
    /// Random table of this width (with --seed)
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub halt_every: u32,
    /// Size cutoff; the table width when omitted
    #[arg(long)]
    pub width_cap: Option<usize>,
    #[arg(long, default_value_t = 1 << 24)]
    pub step_cap: u64,
}

#[derive(Subcommand)]
enum EulerCmd {
    /// Tour the configuration tree; exit 1 if no halting configuration
    Run {
        #[command(flatten)]
        table: TableArgs,
    },
    /// Tour while checking the step is a bijection and reverses exactly
    Audit {
        #[command(flatten)]
        table: TableArgs,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Run an experiment (default: the Bennett k by n grid) to CSV
    Sweep {
        /// pebble-bennett, pebble-search, sim-bennett, sim-audit,
        /// oracle-separator, euler-run, euler-family, sweep or space-bound
        #[arg(long)]
        experiment: Option<String>,
        #[command(flatten)]
        params: Params,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<bool> {
    use revlab::experiment::Experiment as E;
    match command {
        Command::Pebble(PebbleCmd::Bennett { params, moves }) => {
            if moves {
                commands::bennett_moves(&params)
            } else {
                commands::experiment(E::PebbleBennett, &params)
            }
        }
        Command::Pebble(PebbleCmd::Search { params, witness }) => {
            if witness {
                commands::search_witness(&params)
            } else {
                commands::experiment(E::PebbleSearch, &params)
            }
        }
        Command::Sim(SimCmd::Bennett { params, trace }) => {
            if let Some(path) = trace {
                commands::save_sim_trace(&params, &path)?;
            }
            commands::experiment(E::SimBennett, &params)
        }
        Command::Sim(SimCmd::Audit { params }) => commands::experiment(E::SimAudit, &params),
        Command::Oracle(OracleCmd::Build { chain, output }) => {
            commands::oracle_build(&chain, output.as_deref())
        }
        Command::Oracle(OracleCmd::Separator {
            chain,
            trials,
            output,
        }) => commands::oracle_separator(&chain, trials, output),
        Command::Oracle(OracleCmd::Rom { chain, output }) => {
            commands::oracle_rom(&chain, output.as_deref())
        }
        Command::Analyze(AnalyzeCmd::Pebbles {
            run,
            derive,
            output,
        }) => commands::analyze_pebbles(&run, derive, output.as_deref()),
        Command::Analyze(AnalyzeCmd::Compress {
            run,
            tau,
            direction,
            output,
            report_sizes,
        }) => commands::analyze_compress(&run, tau, direction.as_deref(), &output, report_sizes),
        Command::Analyze(AnalyzeCmd::Decompress {
            run,
            input,
            report_sizes,
        }) => commands::analyze_decompress(&run, &input, report_sizes),
        Command::Analyze(AnalyzeCmd::Incompressible { run, system, len }) => {
            commands::analyze_incompressible(&run, &system, len)
        }
        Command::Euler(EulerCmd::Run { table }) => commands::euler_run(&table),
        Command::Euler(EulerCmd::Audit { table }) => commands::euler_audit(&table),
        Command::Report(ReportCmd::Sweep { experiment, params }) => {
            let e = match experiment {
                Some(name) => name.parse()?,
                None => E::Sweep,
            };
            commands::experiment(e, &params)
        }
    }
}
