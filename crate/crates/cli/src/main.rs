use std::process::ExitCode;

fn main() -> ExitCode {
    dirdiff_cli::run(std::env::args_os())
}
