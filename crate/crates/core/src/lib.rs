//! Inline tests for Python source files.
//!
//! An inline test is a statement such as
//!
//! ```python
//! m = re.match(r"^(.+):\d+$", name)
//! itest().given(name, "a:0").check_eq(m.group(1), "a")
//! ```
//!
//! written directly after the statement it checks. This crate finds those
//! statements, binds each to its target, builds a small standalone program
//! per test case and runs it in a fresh interpreter process.
//!
//! The pipeline is split by stage:
//!
//! * [`discovery`] resolves paths and loads source files,
//! * [`finder`] locates inline-test statements,
//! * [`extractor`] validates them into [`extractor::InlineTestDecl`]s,
//! * [`assembler`] expands declarations into runnable [`assembler::TestCase`]s,
//! * [`executor`] selects, orders and runs them,
//! * [`reporter`] renders terminal output and the JSON report.
//!
//! [`collect`] glues the first four stages together per file and
//! [`session::run`] drives a whole run.

pub mod assembler;
pub mod collect;
pub mod config;
pub mod discovery;
pub mod error;
pub mod executor;
pub mod extractor;
pub mod finder;
pub mod names;
pub mod parallel;
pub mod reporter;
pub mod sentinel;
pub mod session;
pub mod source;
pub mod walk;

pub use config::{Parallelism, RunConfig};
pub use error::{CollectionError, CollectionWarning, ReasonCode};
