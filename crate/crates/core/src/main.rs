use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coherent_thermo::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    match cli::execute(&args) {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
