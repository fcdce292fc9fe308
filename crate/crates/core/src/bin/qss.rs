use std::process::ExitCode;

use clap::Parser;
use qss::cli::{execute, init_logging, Cli, Exit};

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage.code() as u8 } else { 0 });
        }
    };
    let status = execute(&cli, &mut std::io::stdout().lock());
    ExitCode::from(status.code() as u8)
}
