use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use conelab::lab::cli::{exit_code, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = cli.execute();
    match &result {
        Ok(o) => {
            let _ = std::io::stdout().write_all(o.text.as_bytes());
            if o.report.failed_rows() > 0 {
                eprintln!("conelab: {} row(s) failed", o.report.failed_rows());
            }
        }
        Err(e) => eprintln!("conelab: {e}"),
    }
    ExitCode::from(exit_code(&result))
}
