use clap::Parser;

use kinflow_cli::{run_cli, Cli};

fn main() {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(dir) => eprintln!("wrote {}", dir.display()),
        Err(e) => {
            eprintln!("kinflow: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
