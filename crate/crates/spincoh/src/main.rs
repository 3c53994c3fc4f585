use std::process::ExitCode;

fn main() -> ExitCode {
    spincoh::cli::main_with(std::env::args_os())
}
