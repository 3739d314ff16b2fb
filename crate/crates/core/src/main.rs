use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cgmodel::cli::run(std::env::args_os()) as u8)
}
