//! Collection: load, find, extract and assemble every file of a run.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::assembler::{self, TestCase};
use crate::discovery;
use crate::error::{CollectionError, CollectionWarning};
use crate::extractor;
use crate::parallel::{self, Strategy};

/// Everything collected from one subject file.
#[derive(Debug, Default)]
pub struct FileCollection {
    pub path: String,
    pub cases: Vec<TestCase>,
    /// Distinct import statements copied into this file's programs, in
    /// first-use order.
    pub support_imports: Vec<String>,
    pub errors: Vec<CollectionError>,
    pub warnings: Vec<CollectionWarning>,
}

/// Everything collected from a run's files, in file order.
#[derive(Debug, Default)]
pub struct Collection {
    pub files: Vec<FileCollection>,
}

impl Collection {
    pub fn cases(&self) -> impl Iterator<Item = &TestCase> {
        self.files.iter().flat_map(|f| f.cases.iter())
    }

    pub fn into_cases(self) -> Vec<TestCase> {
        self.files.into_iter().flat_map(|f| f.cases).collect()
    }

    pub fn errors(&self) -> Vec<CollectionError> {
        self.files
            .iter()
            .flat_map(|f| f.errors.iter().cloned())
            .collect()
    }

    pub fn warnings(&self) -> Vec<CollectionWarning> {
        self.files
            .iter()
            .flat_map(|f| f.warnings.iter().cloned())
            .collect()
    }
}

/// Collects every file in `paths` (already resolved and sorted).
pub fn collect(
    paths: &[PathBuf],
    default_timeout: Option<Duration>,
    strategy: Strategy,
) -> Collection {
    Collection {
        files: parallel::map(paths, strategy, |path| collect_file(path, default_timeout)),
    }
}

/// Runs the collection stages for a single file.
pub fn collect_file(path: &Path, default_timeout: Option<Duration>) -> FileCollection {
    let source = match discovery::load_source(path) {
        Ok(source) => source,
        Err(error) => {
            return FileCollection {
                path: error.path.clone(),
                errors: vec![error],
                ..FileCollection::default()
            }
        }
    };
    let mut out = FileCollection {
        path: source.display.clone(),
        ..FileCollection::default()
    };
    let (decls, errors) = extractor::extract_all(&source);
    out.errors = errors;
    for decl in &decls {
        out.warnings.extend(extractor::given_warnings(decl));
    }

    let mut per_line: HashMap<usize, usize> = HashMap::new();
    for decl in &decls {
        *per_line.entry(decl.location.line).or_default() += 1;
    }

    let subject_dir = std::path::absolute(path)
        .ok()
        .and_then(|p| p.parent().map(Path::to_path_buf));
    let (cases, errors) = assembler::assemble_file(&source, decls, default_timeout);
    out.errors.extend(errors);
    let mut seen_imports = BTreeSet::new();
    for (mut case, support) in cases {
        if per_line[&case.line] > 1 {
            let mut id = format!("{}::{}:{}", case.file, case.line, case.column);
            if case.decl.parameterized {
                id.push_str(&format!("[p{}]", case.param_index));
            }
            if case.decl.test_name.is_none() {
                case.display_name = id.clone();
            }
            case.id = id;
        }
        case.subject_dir = subject_dir.clone();
        for import in support.imports {
            if seen_imports.insert(import.clone()) {
                out.support_imports.push(import);
            }
        }
        out.cases.push(case);
    }
    out.errors.sort_by_key(|e| e.line);
    out
}
