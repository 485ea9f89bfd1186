use clap::Parser;

fn main() {
    let cli = optoforce_cli::Cli::parse();
    if let Err(e) = optoforce_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
