use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(rains_lab::run(std::env::args().collect()))
}
