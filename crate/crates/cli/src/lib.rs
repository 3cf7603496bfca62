//! Command-line front end for the error-suppression simulator.

pub mod commands;
pub mod record;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use commands::{Cli, CmdError, Command};

fn open_output(path: Option<&std::path::Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Run one parsed command, returning the process exit code.
pub fn dispatch(cli: &Cli) -> i32 {
    let result = run_command(cli);
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("revsup: {err}");
            err.exit_code()
        }
    }
}

fn run_command(cli: &Cli) -> Result<(), CmdError> {
    use commands::*;

    let output = match &cli.command {
        Command::Run(args) => args.output.out.as_deref(),
        Command::Sweep(args) => args.output.out.as_deref(),
        Command::Fig3(args) => args.output.out.as_deref(),
        Command::Fig4(args) => args.output.out.as_deref(),
        Command::Fig5(args) => args.output.out.as_deref(),
        Command::Mc(args) => args.output.out.as_deref(),
        Command::Validate(_) => None,
    };
    let mut out = open_output(output)?;
    match &cli.command {
        Command::Run(args) => cmd_run(args, &mut out)?,
        Command::Sweep(args) => {
            let mut log = io::stderr().lock();
            cmd_sweep(args, &mut out, &mut log)?
        }
        Command::Fig3(args) => cmd_fig3(args, &mut out)?,
        Command::Fig4(args) => cmd_fig4(args, &mut out)?,
        Command::Fig5(args) => cmd_fig5(args, &mut out)?,
        Command::Mc(args) => cmd_mc(args, &mut out)?,
        Command::Validate(args) => validate::cmd_validate(args, &mut out)?,
    }
    out.flush()?;
    Ok(())
}
