//! Output directory handling: results land atomically per run — either every
//! file is written or the partially written set is removed.

use std::fs;
use std::path::{Path, PathBuf};

use asyncov::Result;

pub struct OutputSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Removes everything written so far (called when a later step fails).
    pub fn discard(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(&p);
        }
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }
}
