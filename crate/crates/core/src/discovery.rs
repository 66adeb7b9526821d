//! Resolving command-line paths into subject files and loading them.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::error::{CollectionError, ReasonCode};
use crate::source::{display_path, SourceFile};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiscoveryError {
    #[error("path does not exist: {0}")]
    NonexistentPath(String),
}

/// Expands `paths` into the sorted, de-duplicated list of files to scan.
///
/// Directories are walked recursively for `*.py` files; hidden directories
/// are skipped and each real directory is entered at most once, so symlink
/// cycles terminate. Explicit file arguments are kept whatever their
/// extension.
pub fn resolve_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>, DiscoveryError> {
    for path in paths {
        if fs::metadata(path).is_err() {
            return Err(DiscoveryError::NonexistentPath(path.display().to_string()));
        }
    }

    let mut found: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut visited_dirs: HashSet<PathBuf> = HashSet::new();
    for path in paths {
        if path.is_dir() {
            walk_dir(path, &mut visited_dirs, &mut found);
        } else {
            let display = display_path(path);
            found
                .entry(display.clone())
                .or_insert_with(|| PathBuf::from(display));
        }
    }
    Ok(found.into_values().collect())
}

fn walk_dir(root: &Path, visited: &mut HashSet<PathBuf>, found: &mut BTreeMap<String, PathBuf>) {
    let walker = WalkDir::new(root)
        .follow_links(true)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|entry| {
            if !entry.file_type().is_dir() {
                return true;
            }
            if entry.depth() > 0 && is_hidden(entry.file_name()) {
                return false;
            }
            match fs::canonicalize(entry.path()) {
                Ok(real) => visited.insert(real),
                Err(_) => false,
            }
        });
    // Loop errors reported by walkdir are already cut off by the guard above;
    // unreadable entries are skipped.
    for entry in walker.flatten() {
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "py") {
            let display = display_path(entry.path());
            found
                .entry(display.clone())
                .or_insert_with(|| PathBuf::from(display));
        }
    }
}

fn is_hidden(name: &std::ffi::OsStr) -> bool {
    name.to_str()
        .is_some_and(|n| n.starts_with('.') && n != "." && n != "..")
}

/// Reads and parses one subject file. Failures become a single collection
/// error for the file.
pub fn load_source(path: &Path) -> Result<SourceFile, CollectionError> {
    let display = display_path(path);
    let bytes = fs::read(path)
        .map_err(|e| CollectionError::new(&display, None, ReasonCode::ReadError, e.to_string()))?;
    let mut text = String::from_utf8(bytes).map_err(|e| {
        CollectionError::new(
            &display,
            None,
            ReasonCode::DecodeError,
            format!("file is not valid UTF-8: {e}"),
        )
    })?;
    if text.starts_with('\u{feff}') {
        text.drain(..'\u{feff}'.len_utf8());
    }
    SourceFile::parse(path, text).map_err(|e| {
        CollectionError::new(
            &display,
            Some(e.line),
            ReasonCode::SyntaxError,
            format!("invalid syntax at column {}: {}", e.column, e.message),
        )
    })
}
