use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(susy_lab::cli::run(std::env::args_os()))
}
