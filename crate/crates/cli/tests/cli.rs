use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn runner(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itest-runner"))
        .args(args)
        .current_dir(cwd)
        .env_remove("ITEST_INTERPRETER")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const PASSING: &str = "from inline import itest\nx = 2\ny = x * 3\nitest(tag=[\"math\"]).given(x, 1).check_eq(y, 3)\n";

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--no-such-flag"],
        vec!["-n", "0"],
        vec!["-n", "lots"],
        vec!["--timeout", "0"],
        vec!["--timeout", "-1"],
        vec!["missing_dir/"],
    ] {
        let out = runner(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = runner(dir.path(), &["missing_dir/"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing_dir"));
}

#[test]
fn report_write_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.py"), PASSING).unwrap();
    let out = runner(dir.path(), &["--report", "no/such/dir/report.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_selection_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.py"), PASSING).unwrap();
    let out = runner(dir.path(), &["--group", "nothing"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 passed, 0 failed, 0 skipped, 0 timeout, 0 errors in "));
}

#[test]
fn default_path_is_current_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("pkg")).unwrap();
    fs::write(dir.path().join("pkg/a.py"), PASSING).unwrap();
    fs::write(dir.path().join("notes.txt"), "itest()").unwrap();
    let out = runner(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("pkg/a.py::4 PASSED"), "{text}");
    assert!(text.contains("1 passed, 0 failed"));
}

#[test]
fn list_only_shows_ids_tags_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.py"), PASSING).unwrap();
    fs::write(
        dir.path().join("b.py"),
        "from inline import itest\nx = 1\nitest().given(x, 2)\n",
    )
    .unwrap();
    let out = runner(
        dir.path(),
        &["--list-only", "--interpreter", "/no/such/python"],
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("a.py::4 tags=[math]"), "{text}");
    assert!(text.contains("b.py:3 NO_CHECK"), "{text}");
    assert!(text.contains("1 tests collected, 1 errors"), "{text}");
}

#[test]
fn interpreter_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.py"), PASSING).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_itest-runner"))
        .current_dir(dir.path())
        .env("ITEST_INTERPRETER", "/no/such/python")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("/no/such/python"));
}

#[test]
fn ignore_import_errors_skips_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.py"), PASSING).unwrap();
    fs::write(
        dir.path().join("b.py"),
        "import not_installed_anywhere\nfrom inline import itest\nv = not_installed_anywhere.f()\nitest().check_true(v)\n",
    )
    .unwrap();
    let out = runner(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("IMPORT_ERROR"));

    let out = runner(
        dir.path(),
        &["--inlinetest-ignore-import-errors", "--report", "r.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["collection_errors"][0]["reason"], "IMPORT_SKIPPED");
    assert_eq!(report["cases"].as_array().unwrap().len(), 1);
}

#[test]
fn local_modules_are_importable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("helpers.py"),
        "def triple(v):\n    return v * 3\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("a.py"),
        "from helpers import triple\nfrom inline import itest\nx = 1\ny = triple(x)\nitest().given(x, 2).check_eq(y, 6)\n",
    )
    .unwrap();
    let out = runner(dir.path(), &["a.py"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn help_mentions_inline_only_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = runner(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("runs inline tests only"));
    assert!(text.contains("--inlinetest-group"));
}

#[test]
fn json_report_is_sorted_and_versioned() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.py"), PASSING).unwrap();
    let out = runner(dir.path(), &["--report", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("r.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["schema_version"], "1");
    let keys: Vec<&String> = report.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim())
        .collect();
    assert!(top[0].starts_with("\"cases\""), "{top:?}");
    assert_eq!(report["cases"][0]["status"], "PASSED");
    assert_eq!(report["cases"][0]["tags"][0], "math");
}
