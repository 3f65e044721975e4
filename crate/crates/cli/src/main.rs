use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cadenza_cli::run(std::env::args_os()))
}
