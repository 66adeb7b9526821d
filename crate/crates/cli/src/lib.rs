//! Command-line front end for `itest-core`.

use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use itest_core::{Parallelism, RunConfig};

const ABOUT: &str = "Find, assemble and run inline tests embedded in Python source files.";

const LONG_ABOUT: &str = "\
Find, assemble and run inline tests embedded in Python source files.

An inline test is a statement such as
    itest().given(name, \"a:0\").check_eq(m.group(1), \"a\")
placed right after the statement it checks. Only files that import `itest`
are scanned. Each test case is built into a standalone program and run in
its own interpreter process.

This tool runs inline tests only; there is no mode that also runs unit
tests. Use --list-only to analyze without executing anything.";

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "itest-runner", version, about = ABOUT, long_about = LONG_ABOUT)]
pub struct Cli {
    /// Files or directories to scan. Directories are searched recursively
    /// for `.py` files.
    #[arg(default_value = ".")]
    pub paths: Vec<PathBuf>,

    /// Run only tests carrying this tag (repeatable).
    #[arg(long = "group", visible_alias = "inlinetest-group", value_name = "TAG")]
    pub group: Vec<String>,

    /// Run tests with this tag first, in flag order (repeatable).
    #[arg(long = "order", visible_alias = "inlinetest-order", value_name = "TAG")]
    pub order: Vec<String>,

    /// Run only tests whose name contains EXPR.
    #[arg(short = 'k', value_name = "EXPR")]
    pub name_filter: Option<String>,

    /// Number of worker processes, or `auto` for one per CPU.
    #[arg(
        short = 'n',
        long = "workers",
        value_name = "N|auto",
        default_value = "1"
    )]
    pub workers: Parallelism,

    /// Skip files whose imports fail instead of reporting an error.
    #[arg(long, visible_alias = "inlinetest-ignore-import-errors")]
    pub ignore_import_errors: bool,

    /// Timeout in seconds for tests that do not declare one.
    #[arg(long, value_name = "SECONDS", value_parser = positive_seconds)]
    pub timeout: Option<Duration>,

    /// Interpreter command used to run generated programs.
    #[arg(
        long,
        value_name = "CMD",
        env = "ITEST_INTERPRETER",
        default_value = "python3"
    )]
    pub interpreter: String,

    /// Write a JSON report to PATH.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,

    /// List collected tests and collection errors without running anything.
    #[arg(long)]
    pub list_only: bool,

    /// Show durations and full error output.
    #[arg(short, long)]
    pub verbose: bool,
}

fn positive_seconds(text: &str) -> Result<Duration, String> {
    let seconds: f64 = text
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if !seconds.is_finite() || seconds <= 0.0 {
        return Err(format!("timeout must be positive, got {text}"));
    }
    Duration::try_from_secs_f64(seconds).map_err(|e| e.to_string())
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, String> {
        let interpreter_command: Vec<String> = self
            .interpreter
            .split_whitespace()
            .map(str::to_string)
            .collect();
        if interpreter_command.is_empty() {
            return Err("--interpreter must not be empty".into());
        }
        let mut config = RunConfig {
            paths: self.paths,
            group_tags: self.group,
            order_tags: self.order,
            name_filter: self.name_filter,
            parallelism: self.workers,
            ignore_import_errors: self.ignore_import_errors,
            default_timeout: self.timeout,
            interpreter_command,
            report_path: self.report,
            list_only: self.list_only,
        };
        config.normalize();
        Ok(config)
    }
}
