//! One complete run: discovery through execution.

use std::path::PathBuf;
use std::time::Instant;

use thiserror::Error;

use crate::collect::{self, FileCollection};
use crate::config::RunConfig;
use crate::discovery::{self, DiscoveryError};
use crate::error::{CollectionError, ReasonCode};
use crate::executor::{self, TestOutcome};
use crate::parallel::Strategy;
use crate::reporter::{ConfigEcho, Report};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Discovery(#[from] DiscoveryError),
    #[error("cannot prepare the run directory: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs (or, with `list_only`, lists) every inline test under the
/// configured paths.
pub fn run(config: &RunConfig) -> Result<Report, SessionError> {
    let start = Instant::now();
    let files = discovery::resolve_paths(&config.paths)?;
    let mut collection = collect::collect(&files, config.default_timeout, Strategy::default());
    if !config.list_only {
        check_imports(&mut collection.files, config)?;
    }

    let collection_errors = collection.errors();
    let warnings = collection.warnings();
    let files_scanned = collection.files.len();
    let cases = collection.into_cases();

    let outcomes = if config.list_only {
        let (runnable, mut listed) = executor::select(cases, config);
        listed.extend(runnable.iter().map(TestOutcome::not_run));
        executor::order(&mut listed, &config.order_tags);
        listed
    } else {
        executor::execute(cases, config)?
    };

    Ok(Report {
        config: ConfigEcho::from(config),
        files_scanned,
        outcomes,
        collection_errors,
        warnings,
        wall_time: start.elapsed(),
    })
}

/// Drops the cases of files whose support imports fail. The file gets an
/// IMPORT_SKIPPED entry when import errors are ignored, IMPORT_ERROR
/// otherwise.
fn check_imports(files: &mut [FileCollection], config: &RunConfig) -> std::io::Result<()> {
    let probed: Vec<usize> = (0..files.len())
        .filter(|&i| !files[i].cases.is_empty() && !files[i].support_imports.is_empty())
        .collect();
    if probed.is_empty() {
        return Ok(());
    }
    let workdir = tempfile::Builder::new().prefix("itest-probe-").tempdir()?;
    let jobs: Vec<(&[String], Option<PathBuf>)> = probed
        .iter()
        .map(|&i| {
            let file = &files[i];
            (
                file.support_imports.as_slice(),
                file.cases[0].subject_dir.clone(),
            )
        })
        .collect();
    let results = executor::ordered_pool(&jobs, config.workers(), |(imports, dir)| {
        executor::probe_imports(imports, dir.as_deref(), config, workdir.path())
    });
    for (i, result) in probed.into_iter().zip(results) {
        // A probe that could not run proves nothing; the cases run and
        // report their own errors.
        let Ok(failures) = result else { continue };
        if failures.is_empty() {
            continue;
        }
        let file = &mut files[i];
        let (reason, verb) = if config.ignore_import_errors {
            (ReasonCode::ImportSkipped, "skipped")
        } else {
            (ReasonCode::ImportError, "not run")
        };
        file.errors.push(CollectionError::new(
            file.path.clone(),
            None,
            reason,
            format!(
                "{} test(s) {verb}: {}",
                file.cases.len(),
                failures.join("; ")
            ),
        ));
        file.cases.clear();
    }
    Ok(())
}
