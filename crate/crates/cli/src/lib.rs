//! Library side of the `stableprod` binary, exposed so integration tests
//! can run commands in-process.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command};
use error::CliResult;
use output::Table;

/// Runs one subcommand and returns its table together with the output
/// options it should be written with.
pub fn execute(command: &Command) -> CliResult<(Table, &args::OutputArgs)> {
    use commands::*;
    Ok(match command {
        Command::Persist(a) => (persist_table(a, &persist(a)?), &a.run.output),
        Command::Tails(a) => (tails_table(a, &tails(a)?), &a.run.output),
        Command::Gtime(a) => (gtime_table(a, &gtime(a)?), &a.run.output),
        Command::Passage(a) => (passage_table(a, &passage(a)?), &a.run.output),
        Command::BridgeCheck(a) => (bridge_table(a, &bridge_check(a)?), &a.run.output),
        Command::Mellin(a) => (mellin_table(a, &mellin(a)?), &a.output),
        Command::XyCheck(a) => (xy_table(a, &xy_check(a)?), &a.output),
        Command::Report(a) => (report_table(a, &report(a)?), &a.run.output),
    })
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let (table, out) = execute(&cli.command)?;
    table.write(out)
}
