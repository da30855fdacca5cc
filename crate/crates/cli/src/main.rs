use clap::Parser;
use tagstock_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("tagstock: {err}");
        std::process::exit(1);
    }
}
