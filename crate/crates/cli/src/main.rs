mod args;
mod commands;
mod error;
mod report;
mod source;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::{CliError, CliResult, EXIT_USAGE};

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("CPTWB_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("CPTWB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn execute(cli: &Cli) -> CliResult<()> {
    init_threads()?;
    let report = commands::run(&cli.command, &cli.output)?;
    let text = report.render(cli.output.format);
    match &cli.output.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>".as_ref(), e)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
