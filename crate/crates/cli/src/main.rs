use clap::Parser;

fn main() {
    let cli = qhd_cli::Cli::parse();
    std::process::exit(qhd_cli::run(&cli));
}
