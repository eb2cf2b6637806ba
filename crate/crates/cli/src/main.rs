use clap::Parser;

fn main() {
    let cli = biquant_cli::Cli::parse();
    let code = biquant_cli::main_with(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
