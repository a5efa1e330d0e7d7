use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(laser_mpemba::cli::main_with_args(std::env::args_os()))
}
