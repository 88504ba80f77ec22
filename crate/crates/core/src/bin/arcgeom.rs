use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(arcgeom::cli::run(std::env::args_os()) as u8)
}
