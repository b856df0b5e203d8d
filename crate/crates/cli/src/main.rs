use clap::Parser;

use epp_cli::args::{Cli, Command};
use epp_cli::commands;

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => commands::cmd_train(args),
        Command::Prune(args) => commands::cmd_prune(args),
        Command::Benchmark(args) => commands::cmd_benchmark(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
