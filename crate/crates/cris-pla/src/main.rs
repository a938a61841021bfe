use clap::Parser;

fn main() {
    let cli = cris_pla::cli::Cli::parse();
    if let Err(e) = cris_pla::cli::execute(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
