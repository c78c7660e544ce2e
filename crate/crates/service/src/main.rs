use std::process::ExitCode;

fn main() -> ExitCode {
    gridiron_service::cli::main_with(std::env::args_os())
}
