use clap::Parser;

fn main() {
    let cli = volterra_cli::Cli::parse();
    if let Err(e) = volterra_cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
