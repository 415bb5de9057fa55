use std::process::ExitCode;

fn main() -> ExitCode {
    qrng_cli::run(std::env::args_os())
}
