use clap::Parser;

use bullwhip::cli::{self, Cli};
use bullwhip::Error;

fn main() {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    if let Err(e) = cli::execute(cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Usage(_) => 2,
            _ => 3,
        };
        std::process::exit(code);
    }
}
