//! Artifact collection and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::RunError;

/// Files produced by a run, held in memory until the run succeeds.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_json(&mut self, name: impl Into<String>, value: &impl Serialize) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report serialization cannot fail");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    /// Renders into a buffer; writes to a `Vec` cannot fail.
    pub fn add_with(&mut self, name: impl Into<String>, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) {
        let mut bytes = Vec::new();
        f(&mut bytes).expect("in-memory write");
        self.add(name, bytes);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn entries(&self) -> Vec<FileEntry> {
        self.files.iter().map(|(n, b)| FileEntry { name: n.clone(), bytes: b.len() }).collect()
    }

    pub fn write_all(&self, dir: &Path) -> Result<(), RunError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for (name, bytes) in &self.files {
            write_atomic(&dir.join(name), bytes)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
}

/// Writes to a hidden sibling, then renames over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| io_err(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> RunError {
    RunError::Io { path: path.display().to_string(), source }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::default();
        a.add("one.csv", b"k\n1\n".to_vec());
        a.add_json("two.json", &[1, 2]);
        a.write_all(&dir.path().join("nested")).unwrap();
        let mut names: Vec<_> = fs::read_dir(dir.path().join("nested"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, vec!["one.csv", "two.json"]);
        assert_eq!(fs::read(dir.path().join("nested/one.csv")).unwrap(), b"k\n1\n");
    }
}
