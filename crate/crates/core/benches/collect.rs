use std::fs;
use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use itest_core::collect;
use itest_core::parallel::Strategy;

const SUBJECT: &str = r#"import re
from inline import itest

def helper(v):
    return v.strip()

def get_assignment_map(names):
    for name in names:
        m = re.match("^(.+):\\d+$", helper(name))
        itest().given(name, "a:0").check_eq(m.group(1), "a")
        itest(parameterized=True).given(name, ["a:0", "a:1:1"]).check_eq(m.group(1), ["a", "a:1"])
        itest().given(name, "a:a").check_none(m)
        if m is not None:
            name = m.group(1)
"#;

fn corpus(dir: &std::path::Path, files: usize) -> Vec<PathBuf> {
    (0..files)
        .map(|i| {
            let path = dir.join(format!("subject_{i:04}.py"));
            fs::write(&path, SUBJECT).unwrap();
            path
        })
        .collect()
}

fn bench_collect(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let mut group = c.benchmark_group("collect");
    for files in [16usize, 128, 512] {
        let sub = dir.path().join(files.to_string());
        fs::create_dir_all(&sub).unwrap();
        let paths = corpus(&sub, files);
        for (name, strategy) in [
            ("sequential", Strategy::Sequential),
            ("parallel", Strategy::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, files), &paths, |b, paths| {
                b.iter(|| black_box(collect::collect(paths, None, strategy)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_collect);
criterion_main!(benches);
