use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(anharmonic_cli::main_with(std::env::args_os()))
}
