use clap::Parser;
use ucpd_cli::commands::{run, Cli};
use ucpd_core::parallel::{threads_from_env, with_threads};

fn main() {
    let cli = Cli::parse();
    let code = with_threads(threads_from_env(), || run(cli));
    std::process::exit(code);
}
