use clap::Parser;

fn main() {
    let cli = cavity_ghz::cli::Cli::parse();
    std::process::exit(cavity_ghz::cli::run_cli(cli));
}
