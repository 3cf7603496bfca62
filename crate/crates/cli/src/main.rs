use clap::Parser;

fn main() {
    let cli = revsup_cli::Cli::parse();
    std::process::exit(revsup_cli::dispatch(&cli));
}
