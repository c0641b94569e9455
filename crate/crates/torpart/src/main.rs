use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(torpart::cli::run(std::env::args_os()))
}
