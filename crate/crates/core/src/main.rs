use clap::Parser;

use circle_sobolev::cli::{run, Cli};

fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(run(Cli::parse()))
}
