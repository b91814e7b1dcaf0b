use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use hyperharmonic_cli::{run, Cli, UsageError, EXIT_FAILED, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILED
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
