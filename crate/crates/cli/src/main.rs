use clap::Parser;

fn main() {
    let cli = subexp_cli::Cli::parse();
    let code = match subexp_cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
