//! Artifact writers. All numbers in CSVs use fixed 6-decimal formatting so
//! files are byte-stable across platforms and reruns.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HarnessError, Result};

/// Placeholder for cells that have no value, e.g. path distances of the ideal row.
pub const EMPTY_CELL: &str = "—";

pub fn f6(x: f64) -> String {
    // avoid "-0.000000" from tiny negative round-off
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn opt6(x: Option<f64>) -> String {
    x.map_or_else(|| EMPTY_CELL.to_string(), f6)
}

/// Writes into one output directory and remembers every file it produced,
/// relative to that directory, in creation order.
#[derive(Debug)]
pub struct ArtifactDir {
    root: PathBuf,
    written: Vec<String>,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| HarnessError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn prepare(&mut self, rel: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
        self.written.push(rel.to_string());
        Ok(path)
    }

    pub fn csv<I>(&mut self, rel: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.prepare(rel)?;
        let to_io = |e: csv::Error| HarnessError::io(&path, e.into());
        let mut w = csv::Writer::from_path(&path).map_err(to_io)?;
        w.write_record(header).map_err(to_io)?;
        for row in rows {
            w.write_record(&row).map_err(to_io)?;
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))
    }

    pub fn text(&mut self, rel: &str, contents: &str) -> Result<()> {
        let path = self.prepare(rel)?;
        fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))
    }

    pub fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).expect("summary types serialize");
        s.push('\n');
        self.text(rel, &s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_decimals() {
        assert_eq!(f6(0.5), "0.500000");
        assert_eq!(f6(-1e-12), "0.000000");
        assert_eq!(f6(1.0 / 3.0), "0.333333");
        assert_eq!(opt6(None), "—");
    }
}
