use std::process::ExitCode;

use clap::Parser;
use prefplan_cli::commands::{emit, out_path, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = run(&cli);
    if !output.text.is_empty() {
        if let Err(e) = emit(out_path(&cli), &output.text) {
            eprintln!("input error: {e:#}");
            return ExitCode::from(2);
        }
    }
    match output.status {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
