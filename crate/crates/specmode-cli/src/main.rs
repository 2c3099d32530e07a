use clap::Parser;
use specmode_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("specmode: {err}");
        std::process::exit(err.exit_code());
    }
}
