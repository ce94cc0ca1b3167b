use std::process::ExitCode;

use clap::Parser;
use ringcavity::cli::{self, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli::execute(&cli.command) {
        Ok(manifest) => {
            for file in &manifest.files {
                println!("{}  {}", file.sha256, file.path);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
