use clap::Parser;

fn main() {
    let cli = qshadow::Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = qshadow::run(cli, &mut out) {
        eprintln!("error: {e:#}");
        std::process::exit(qshadow::exit_code(&e));
    }
}
