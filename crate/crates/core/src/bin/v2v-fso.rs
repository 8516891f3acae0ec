use clap::Parser;

use v2v_fso::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
