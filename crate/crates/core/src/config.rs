use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

/// Requested worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Fixed(usize),
    Auto,
}

impl Parallelism {
    /// Worker count after resolution; `Auto` becomes the logical CPU count.
    pub fn resolve(self) -> usize {
        match self {
            Parallelism::Fixed(n) => n.max(1),
            Parallelism::Auto => std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism::Fixed(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseParallelismError(String);

impl fmt::Display for ParseParallelismError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid worker count `{}`: expected a positive integer or `auto`",
            self.0
        )
    }
}

impl std::error::Error for ParseParallelismError {}

impl FromStr for Parallelism {
    type Err = ParseParallelismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Parallelism::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Parallelism::Fixed(n)),
            _ => Err(ParseParallelismError(s.to_string())),
        }
    }
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::Fixed(n) => write!(f, "{n}"),
            Parallelism::Auto => f.write_str("auto"),
        }
    }
}

/// Everything a run needs to know, assembled from the command line.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub paths: Vec<PathBuf>,
    pub group_tags: Vec<String>,
    pub order_tags: Vec<String>,
    pub name_filter: Option<String>,
    pub parallelism: Parallelism,
    pub ignore_import_errors: bool,
    pub default_timeout: Option<Duration>,
    pub interpreter_command: Vec<String>,
    pub report_path: Option<PathBuf>,
    pub list_only: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            paths: vec![PathBuf::from(".")],
            group_tags: Vec::new(),
            order_tags: Vec::new(),
            name_filter: None,
            parallelism: Parallelism::default(),
            ignore_import_errors: false,
            default_timeout: None,
            interpreter_command: vec!["python3".to_string()],
            report_path: None,
            list_only: false,
        }
    }
}

impl RunConfig {
    /// Drops repeated order tags, keeping the first occurrence.
    pub fn normalize(&mut self) {
        let mut seen = std::collections::HashSet::new();
        self.order_tags.retain(|t| seen.insert(t.clone()));
    }

    pub fn workers(&self) -> usize {
        self.parallelism.resolve()
    }
}
