use clap::Parser;

use bion::cli::{run, Cli, EXIT_USAGE};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap already exits with 2 for usage errors; keep help/version at 0
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.exit_code);
    }
}
