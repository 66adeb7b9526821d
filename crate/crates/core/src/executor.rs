//! Selecting, ordering and running test cases.
//!
//! Every repetition of every case runs in a fresh interpreter process with a
//! minimal environment, its working directory set to the run's temporary
//! directory. The program reports its result through the sentinel protocol
//! on stdout; the exit status alone is only used to tell errors apart.

use std::collections::HashSet;
use std::ffi::{OsStr, OsString};
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitStatus, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use wait_timeout::ChildExt;

use crate::assembler::TestCase;
use crate::config::RunConfig;
use crate::extractor::CheckKind;
use crate::sentinel::{self, Sentinel};

/// Result of one case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Passed,
    Failed,
    SkippedDisabled,
    SkippedAssumption,
    Timeout,
    Error,
    /// Collected but deliberately not executed (`--list-only`).
    NotRun,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Passed => "PASSED",
            Status::Failed => "FAILED",
            Status::SkippedDisabled => "SKIPPED_DISABLED",
            Status::SkippedAssumption => "SKIPPED_ASSUMPTION",
            Status::Timeout => "TIMEOUT",
            Status::Error => "ERROR",
            Status::NotRun => "NOT_RUN",
        }
    }

    /// Whether this status makes the run unsuccessful.
    pub fn is_bad(self) -> bool {
        matches!(self, Status::Failed | Status::Timeout | Status::Error)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The failing check of a FAILED case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check_index: usize,
    pub kind: CheckKind,
    /// The check call as written, e.g. `check_eq(m.group(1), "aa")`.
    pub check_text: String,
    pub actual_expr: String,
    pub actual_repr: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_repr: Option<String>,
    /// 0-based repetition that failed.
    pub repetition: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub case_id: String,
    pub display_name: String,
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub param_index: usize,
    pub tags: Vec<String>,
    pub status: Status,
    pub duration: Duration,
    pub repetitions_run: u32,
    pub failure: Option<Failure>,
    pub error_detail: Option<String>,
}

impl TestOutcome {
    fn for_case(case: &TestCase, status: Status) -> TestOutcome {
        TestOutcome {
            case_id: case.id.clone(),
            display_name: case.display_name.clone(),
            file: case.file.clone(),
            line: case.line,
            column: case.column,
            param_index: case.param_index,
            tags: case.tags.clone(),
            status,
            duration: Duration::ZERO,
            repetitions_run: 0,
            failure: None,
            error_detail: None,
        }
    }

    /// Outcome for a case that is listed but not executed.
    pub fn not_run(case: &TestCase) -> TestOutcome {
        let status = if case.disabled {
            Status::SkippedDisabled
        } else {
            Status::NotRun
        };
        TestOutcome::for_case(case, status)
    }
}

/// Keeps the cases matching the tag and name filters. Disabled cases among
/// them are resolved immediately as SKIPPED_DISABLED.
pub fn select(cases: Vec<TestCase>, config: &RunConfig) -> (Vec<TestCase>, Vec<TestOutcome>) {
    let mut runnable = Vec::new();
    let mut resolved = Vec::new();
    for case in cases {
        let tag_ok =
            config.group_tags.is_empty() || case.tags.iter().any(|t| config.group_tags.contains(t));
        let name_ok = config
            .name_filter
            .as_ref()
            .is_none_or(|k| case.display_name.contains(k.as_str()));
        if !(tag_ok && name_ok) {
            continue;
        }
        if case.disabled {
            resolved.push(TestOutcome::for_case(&case, Status::SkippedDisabled));
        } else {
            runnable.push(case);
        }
    }
    (runnable, resolved)
}

/// Anything that can be placed in the run order.
pub trait Orderable {
    fn tags(&self) -> &[String];
    /// Default order: path, line, column, parameter index.
    fn position(&self) -> (&str, usize, usize, usize);
}

impl Orderable for TestCase {
    fn tags(&self) -> &[String] {
        &self.tags
    }
    fn position(&self) -> (&str, usize, usize, usize) {
        (&self.file, self.line, self.column, self.param_index)
    }
}

impl Orderable for TestOutcome {
    fn tags(&self) -> &[String] {
        &self.tags
    }
    fn position(&self) -> (&str, usize, usize, usize) {
        (&self.file, self.line, self.column, self.param_index)
    }
}

/// Index of the earliest order tag the item carries; items with none go
/// last.
pub fn bucket_of(tags: &[String], order_tags: &[String]) -> usize {
    order_tags
        .iter()
        .position(|t| tags.contains(t))
        .unwrap_or(order_tags.len())
}

/// Sorts by bucket, then default position.
pub fn order<T: Orderable>(items: &mut [T], order_tags: &[String]) {
    items.sort_by(|a, b| {
        bucket_of(a.tags(), order_tags)
            .cmp(&bucket_of(b.tags(), order_tags))
            .then_with(|| a.position().cmp(&b.position()))
    });
}

/// Applies `f` to every item on `workers` threads. Workers take items in
/// index order; results are returned in index order.
pub fn ordered_pool<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, f) = (&next, &f);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(item) = items.get(i) else { break };
                if tx.send((i, f(item))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut results: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
        for (i, r) in rx {
            results[i] = Some(r);
        }
        results
            .into_iter()
            .map(|r| r.expect("every item is processed"))
            .collect()
    })
}

/// File name of a generated program: `itest_` plus the id with every
/// character outside `[A-Za-z0-9_]` replaced by `_`.
pub fn program_file_name(id: &str) -> String {
    let stem: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("itest_{stem}")
}

/// Unique file names for `cases`, in order. Clashing sanitized ids get a
/// numeric suffix.
pub fn program_file_names(cases: &[TestCase]) -> Vec<String> {
    let mut used = HashSet::new();
    cases
        .iter()
        .map(|case| {
            let stem = program_file_name(&case.id);
            let mut name = format!("{stem}.py");
            let mut n = 1;
            while !used.insert(name.clone()) {
                n += 1;
                name = format!("{stem}_{n}.py");
            }
            name
        })
        .collect()
}

/// Grace period allowed after a timeout for the process to be killed.
pub const KILL_GRACE: Duration = Duration::from_millis(500);

const KEPT_ENV: &[&str] = &[
    "PATH",
    "PYTHONHOME",
    "PYTHONPATH",
    "VIRTUAL_ENV",
    "LANG",
    "LC_ALL",
    "TMPDIR",
    "SYSTEMROOT",
];

fn child_env(subject_dir: Option<&Path>) -> Vec<(OsString, OsString)> {
    let mut env: Vec<(OsString, OsString)> = KEPT_ENV
        .iter()
        .filter(|k| **k != "PYTHONPATH")
        .filter_map(|k| std::env::var_os(k).map(|v| (OsString::from(k), v)))
        .collect();
    let mut python_path: Vec<PathBuf> = subject_dir.map(Path::to_path_buf).into_iter().collect();
    if let Some(existing) = std::env::var_os("PYTHONPATH") {
        python_path.extend(std::env::split_paths(&existing));
    }
    if !python_path.is_empty() {
        if let Ok(joined) = std::env::join_paths(python_path) {
            env.push(("PYTHONPATH".into(), joined));
        }
    }
    env.push(("PYTHONDONTWRITEBYTECODE".into(), "1".into()));
    env.push(("PYTHONIOENCODING".into(), "utf-8".into()));
    env
}

/// What happened to one interpreter process.
#[derive(Debug)]
pub struct ProcessRun {
    /// `None` when the process was killed after a timeout.
    pub status: Option<ExitStatus>,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

impl ProcessRun {
    pub fn timed_out(&self) -> bool {
        self.status.is_none()
    }
}

/// Runs `command + [arg]` in `workdir` and waits for it, killing it (and
/// its process group) once `timeout` elapses.
pub fn run_program(
    command: &[String],
    arg: &OsStr,
    workdir: &Path,
    subject_dir: Option<&Path>,
    timeout: Option<Duration>,
) -> io::Result<ProcessRun> {
    let (exe, args) = command
        .split_first()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty interpreter command"))?;
    let mut cmd = Command::new(exe);
    cmd.args(args)
        .arg(arg)
        .current_dir(workdir)
        .env_clear()
        .envs(child_env(subject_dir))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }

    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let stdout = drain(child.stdout.take());
    let stderr = drain(child.stderr.take());
    let status = match timeout {
        None => Some(child.wait()?),
        Some(limit) => match child.wait_timeout(limit)? {
            Some(status) => Some(status),
            None => {
                kill(&mut child);
                child.wait()?;
                None
            }
        },
    };
    let elapsed = start.elapsed();
    Ok(ProcessRun {
        status,
        stdout: stdout.join().unwrap_or_default(),
        stderr: stderr.join().unwrap_or_default(),
        elapsed,
    })
}

fn drain<R: Read + Send + 'static>(pipe: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut pipe) = pipe {
            let _ = pipe.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

fn kill(child: &mut Child) {
    #[cfg(unix)]
    {
        // The child leads its own process group, so this also reaches
        // anything it spawned.
        unsafe {
            libc::killpg(child.id() as libc::pid_t, libc::SIGKILL);
        }
    }
    let _ = child.kill();
}

/// Replaces the temporary directory in interpreter output so reports do not
/// depend on where the run happened.
fn mask_workdir(text: &str, workdir: &Path) -> String {
    let mut out = text.to_string();
    let mut forms = vec![workdir.display().to_string()];
    if let Ok(real) = workdir.canonicalize() {
        forms.push(real.display().to_string());
    }
    forms.sort_by_key(|f| std::cmp::Reverse(f.len()));
    for form in forms {
        if !form.is_empty() {
            out = out.replace(&form, "<tmpdir>");
        }
    }
    out
}

/// Runs one case, `case.repeated` times, from an already written program.
pub fn run_case(
    case: &TestCase,
    program: &Path,
    config: &RunConfig,
    workdir: &Path,
) -> TestOutcome {
    let mut outcome = TestOutcome::for_case(case, Status::Passed);
    for repetition in 0..case.repeated {
        let run = run_program(
            &config.interpreter_command,
            program.as_os_str(),
            workdir,
            case.subject_dir.as_deref(),
            case.timeout,
        );
        outcome.repetitions_run += 1;
        let run = match run {
            Ok(run) => run,
            Err(e) => {
                outcome.repetitions_run -= 1;
                outcome.status = Status::Error;
                outcome.error_detail = Some(format!(
                    "failed to start `{}`: {e}",
                    config.interpreter_command.join(" ")
                ));
                return outcome;
            }
        };
        outcome.duration += run.elapsed;
        if let Some(stop) = classify(case, &run, repetition, workdir) {
            outcome.status = stop.status;
            outcome.failure = stop.failure;
            outcome.error_detail = stop.error_detail;
            return outcome;
        }
    }
    outcome
}

/// `None` when the repetition passed, otherwise the outcome that ends the case.
fn classify(
    case: &TestCase,
    run: &ProcessRun,
    repetition: u32,
    workdir: &Path,
) -> Option<TestOutcome> {
    let stop = |status: Status| TestOutcome::for_case(case, status);
    let Some(exit) = run.status else {
        return Some(stop(Status::Timeout));
    };
    let error = |detail: String| {
        let mut outcome = stop(Status::Error);
        outcome.error_detail = Some(detail);
        Some(outcome)
    };
    let stderr = mask_workdir(run.stderr.trim_end(), workdir);
    let with_stderr = |summary: String| {
        if stderr.is_empty() {
            summary
        } else {
            format!("{summary}\n{stderr}")
        }
    };
    match sentinel::parse_last(&run.stdout) {
        Some(Sentinel::Pass) if exit.success() => None,
        Some(Sentinel::SkipAssumption) if exit.success() => Some(stop(Status::SkippedAssumption)),
        Some(Sentinel::Fail(record)) => {
            let mut outcome = stop(Status::Failed);
            let check_text = case
                .checks
                .get(record.check_index)
                .map(|c| c.call_text())
                .unwrap_or_else(|| record.kind.method().to_string());
            outcome.failure = Some(Failure {
                check_index: record.check_index,
                kind: record.kind,
                check_text,
                actual_expr: record.actual_expr,
                actual_repr: record.actual_repr,
                expected_repr: record.expected_repr,
                repetition,
            });
            Some(outcome)
        }
        Some(Sentinel::Garbled(line)) => {
            error(with_stderr(format!("unreadable result marker: {line}")))
        }
        Some(_) | None => error(with_stderr(match exit.code() {
            Some(0)
                if run.stdout.contains(sentinel::PASS)
                    || run.stdout.contains(sentinel::SKIP_ASSUMPTION) =>
            {
                "result marker was not the last marker printed".to_string()
            }
            Some(0) => "program exited without reporting a result".to_string(),
            Some(code) => format!("program exited with status {code}"),
            None => "program was terminated by a signal".to_string(),
        })),
    }
}

/// Runs `cases` (already selected, ordered and not disabled) on the
/// configured number of workers. Programs are written to a fresh temporary
/// directory that is removed afterwards. Outcomes come back in input order.
pub fn run_suite(cases: &[TestCase], config: &RunConfig) -> io::Result<Vec<TestOutcome>> {
    let workdir = tempfile::Builder::new().prefix("itest-run-").tempdir()?;
    let names = program_file_names(cases);
    let mut programs = Vec::with_capacity(cases.len());
    for (case, name) in cases.iter().zip(&names) {
        let path = workdir.path().join(name);
        std::fs::write(&path, case.program_text())?;
        programs.push(path);
    }
    let jobs: Vec<(&TestCase, &PathBuf)> = cases.iter().zip(&programs).collect();
    let outcomes = ordered_pool(&jobs, config.workers(), |(case, program)| {
        run_case(case, program, config, workdir.path())
    });
    Ok(outcomes)
}

/// Selects, orders and runs `cases`. The outcome list is in run order,
/// including cases skipped as disabled.
pub fn execute(cases: Vec<TestCase>, config: &RunConfig) -> io::Result<Vec<TestOutcome>> {
    let (mut runnable, mut outcomes) = select(cases, config);
    order(&mut runnable, &config.order_tags);
    outcomes.extend(run_suite(&runnable, config)?);
    order(&mut outcomes, &config.order_tags);
    Ok(outcomes)
}

const PROBE_SCRIPT: &str = r#"import json, sys
failed = []
for stmt in json.loads(sys.argv[1]):
    try:
        exec(stmt, {})
    except ImportError as e:
        failed.append("%s: %s" % (stmt, e))
sys.stdout.write("\nITEST-PROBE " + json.dumps(failed) + "\n")
"#;

/// Time allowed for an import probe when no default timeout is configured.
pub const PROBE_TIMEOUT: Duration = Duration::from_secs(120);

/// Tries the import statements a file's programs depend on in one
/// interpreter process. Returns the statements that raised `ImportError`
/// with their messages. `Err` means the probe itself could not run.
pub fn probe_imports(
    imports: &[String],
    subject_dir: Option<&Path>,
    config: &RunConfig,
    workdir: &Path,
) -> Result<Vec<String>, String> {
    if imports.is_empty() {
        return Ok(Vec::new());
    }
    let script = workdir.join("itest_import_probe.py");
    if !script.exists() {
        std::fs::write(&script, PROBE_SCRIPT).map_err(|e| e.to_string())?;
    }
    let mut command = config.interpreter_command.clone();
    command.push(script.display().to_string());
    let payload = serde_json::to_string(imports).map_err(|e| e.to_string())?;
    let run = run_program(
        &command,
        OsStr::new(&payload),
        workdir,
        subject_dir,
        Some(config.default_timeout.unwrap_or(PROBE_TIMEOUT)),
    )
    .map_err(|e| {
        format!(
            "failed to start `{}`: {e}",
            config.interpreter_command.join(" ")
        )
    })?;
    if run.timed_out() {
        return Err("import probe timed out".into());
    }
    let line = run
        .stdout
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("ITEST-PROBE "))
        .ok_or_else(|| format!("import probe failed: {}", run.stderr.trim()))?;
    serde_json::from_str(line).map_err(|e| e.to_string())
}
