use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::de::DeserializeOwned;

/// Environment variable that overrides the default output directory.
pub const OUT_DIR_ENV: &str = "LHARM_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "lharm-out";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read file", path.display()))
}

/// Parses JSON, reporting `file:line:column` and serde's field message.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), e))
}

/// Output directory; files are written atomically (temp file + rename).
pub struct OutDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    /// `--out` wins over the environment variable, which wins over the default.
    pub fn resolve(flag: Option<PathBuf>) -> Self {
        let dir = flag
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        OutDir {
            dir,
            written: Vec::new(),
        }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("{}: cannot create directory", self.dir.display()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("{}: cannot create temporary file", self.dir.display()))?;
        tmp.write_all(contents.as_bytes())?;
        let target = self.dir.join(name);
        tmp.persist(&target)
            .with_context(|| format!("{}: cannot write", target.display()))?;
        self.written.push(target);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Minimal CSV table with a fixed header. Floats use the shortest
/// representation that parses back to the same value.
pub struct Table {
    text: String,
    cols: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            text: format!("{}\n", header.join(",")),
            cols: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.cols);
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:?}"),
            Cell::I(v) => v.to_string(),
            Cell::U(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::U(u64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

#[macro_export]
macro_rules! cells {
    ($($x:expr),* $(,)?) => { &[$($crate::io::Cell::from($x)),*] };
}
