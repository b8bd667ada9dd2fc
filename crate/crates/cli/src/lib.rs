//! Command-line front end for `smld-core`.
//!
//! [`parse_config`] turns an argument vector into a validated [`RunConfig`],
//! [`run`] computes the report, and [`main_with`] ties both to output
//! streams and exit codes.

mod args;
mod commands;
mod error;
mod spec;
mod table;

use std::io::Write;

pub use args::{parse_config, Command, ParseOutcome, RunConfig, SchurQuantity, DETERMINISM_CRITERION};
pub use commands::{run, verify_all, Report};
pub use error::{exit, CliError};
pub use spec::{parse_function, parse_norm};
pub use table::{Cell, Format, Table};

/// Runs the program on `args`, writing the report to `stdout` (unless an
/// output file is given) and diagnostics to `stderr`. Returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match execute(args, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

fn execute<I, T>(args: I, stdout: &mut dyn Write) -> Result<i32, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_config(args)? {
        ParseOutcome::Print(text) => {
            write_all(stdout, &text, "standard output")?;
            return Ok(exit::OK);
        }
        ParseOutcome::Run(c) => c,
    };
    let report = run(&config)?;
    let text = report.table.render(config.format);
    match &config.output {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Output {
            target: path.display().to_string(),
            source,
        })?,
        None => write_all(stdout, &text, "standard output")?,
    }
    Ok(report.exit_code)
}

fn write_all(w: &mut dyn Write, text: &str, target: &str) -> Result<(), CliError> {
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|source| CliError::Output { target: target.to_owned(), source })
}
