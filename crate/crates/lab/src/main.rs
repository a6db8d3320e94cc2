use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use contraction_lab::commands::{is_informational, usage_error};
use contraction_lab::{execute, Cli, SEED_ENV};

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let result = match Cli::try_parse_from(&argv) {
        Ok(cli) => execute(&cli, std::env::var(SEED_ENV).ok().as_deref()),
        Err(e) if is_informational(&e) => e.exit(),
        Err(e) => usage_error(&argv, &e),
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(result.render().as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(result.exit_code() as u8)
}
