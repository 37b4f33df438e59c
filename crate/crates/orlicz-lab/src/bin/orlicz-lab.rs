use clap::Parser;
use orlicz_lab::cli::{run, RunConfig};

fn main() {
    let config = RunConfig::parse();
    std::process::exit(run(&config));
}
