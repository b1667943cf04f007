use clap::Parser;

fn main() {
    std::process::exit(sirs::cli::run(sirs::cli::Cli::parse()));
}
