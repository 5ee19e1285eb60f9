use clap::Parser;

fn main() {
    transversal::cli::configure_threads();
    let cli = transversal::cli::Cli::parse();
    std::process::exit(transversal::cli::main_with(cli));
}
