use std::process::ExitCode;

use clap::Parser;
use nsii_cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::resolve(&cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nsii: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
