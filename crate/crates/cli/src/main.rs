use clap::Parser;

use mvdwls_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(err) = mvdwls_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
