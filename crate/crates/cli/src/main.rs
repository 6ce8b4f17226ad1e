use std::process::ExitCode;

use eetreat_cli::{parse_args, run, CliError};

fn main() -> ExitCode {
    let result = parse_args(std::env::args_os().skip(1)).and_then(|config| run(&config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("eetreat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
