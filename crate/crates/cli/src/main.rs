use std::process::ExitCode;

use clap::Parser;
use itest_core::reporter;
use itest_core::session;
use itest_runner::Cli;

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("itest-runner: error: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = cli.verbose;
    let config = match cli.into_config() {
        Ok(config) => config,
        Err(message) => return usage_error(message),
    };
    let report = match session::run(&config) {
        Ok(report) => report,
        Err(e) => return usage_error(e),
    };
    print!("{}", reporter::render_terminal(&report, verbose));
    if let Some(path) = &config.report_path {
        if let Err(e) = reporter::emit_json(&report, path) {
            return usage_error(format!("cannot write report to {}: {e}", path.display()));
        }
    }
    ExitCode::from(reporter::exit_code(&report) as u8)
}
