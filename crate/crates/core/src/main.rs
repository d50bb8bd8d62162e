use clap::Parser;

use pacfin::cli::{execute, Cli, EXIT_ERROR};

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    std::process::exit(code);
}
