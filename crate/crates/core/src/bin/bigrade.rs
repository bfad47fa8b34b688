use clap::Parser;

fn main() {
    let cli = bigrade::cli::Cli::parse();
    std::process::exit(bigrade::cli::run(cli));
}
