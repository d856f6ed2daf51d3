mod commands;
mod config;
mod error;
mod tasks;

use clap::{Parser, Subcommand};

use crate::commands::{AlapArgs, EvalArgs, GenArgs, OracleArgs, RenderArgs, TraceArgs, TrainArgs};
use crate::config::CONFIG_KEYS;

/// Initial mapping, routing and scheduling environments for quantum circuit
/// compilation, with oracles, baselines and tabular agents.
#[derive(Debug, Parser)]
#[command(name = "qcenv", version, after_help = CONFIG_KEYS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random instances
    #[command(after_help = CONFIG_KEYS)]
    Gen(GenArgs),
    /// Train an agent and write its learning curve, policy and effective config
    #[command(after_help = CONFIG_KEYS)]
    Train(TrainArgs),
    /// Run one episode with a policy and compare against the oracle
    #[command(after_help = CONFIG_KEYS)]
    Eval(EvalArgs),
    /// Solve an instance exactly
    #[command(after_help = CONFIG_KEYS)]
    Oracle(OracleArgs),
    /// ALAP list schedule of a circuit
    #[command(after_help = CONFIG_KEYS)]
    Alap(AlapArgs),
    /// Draw graphs, mappings, schedules or the end state of a trace
    #[command(after_help = CONFIG_KEYS)]
    Render(RenderArgs),
    /// Play a scripted action sequence and write the golden trace
    #[command(after_help = CONFIG_KEYS)]
    Trace(TraceArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Train(args) => commands::train(args),
        Command::Eval(args) => commands::eval(args),
        Command::Oracle(args) => commands::oracle(args),
        Command::Alap(args) => commands::alap(args),
        Command::Render(args) => commands::render(args),
        Command::Trace(args) => commands::trace(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
