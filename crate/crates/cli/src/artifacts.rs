use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;

/// Name of the summary file written last by every command.
pub const SUMMARY_FILE: &str = "summary.json";

/// Single writer for the output directory. Unless [`Artifacts::finish`] runs,
/// everything it created is removed on drop.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<String>,
    finished: bool,
}

impl Artifacts {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        let created_dir = !dir.exists();
        fs::create_dir_all(&dir).map_err(eit_core::EitError::from)?;
        Ok(Self { dir, created_dir, files: Vec::new(), finished: false })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Writes `name` through `body` and records it.
    pub fn write<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        if name == SUMMARY_FILE || self.files.iter().any(|f| f == name) {
            return Err(CliError::Validation(format!("output file {name} declared twice")));
        }
        let path = self.dir.join(name);
        self.files.push(name.to_string());
        let mut w = BufWriter::new(File::create(&path).map_err(eit_core::EitError::from)?);
        body(&mut w)?;
        w.flush().map_err(eit_core::EitError::from)?;
        Ok(())
    }

    /// Records files that a library call wrote directly into the directory.
    pub fn adopt(&mut self, paths: &[PathBuf]) {
        for p in paths {
            if let Some(name) = p.file_name().and_then(|n| n.to_str()) {
                self.files.push(name.to_string());
            }
        }
    }

    /// Writes `summary.json` listing every declared file, then keeps the outputs.
    pub fn finish(mut self, command: &str, results: Value) -> Result<PathBuf, CliError> {
        let mut files = self.files.clone();
        files.push(SUMMARY_FILE.to_string());
        let summary = serde_json::json!({ "command": command, "files": files, "results": results });
        let path = self.dir.join(SUMMARY_FILE);
        self.files.push(SUMMARY_FILE.to_string());
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        fs::write(&path, text).map_err(eit_core::EitError::from)?;
        self.finished = true;
        Ok(path)
    }
}

impl Drop for Artifacts {
    fn drop(&mut self) {
        if self.finished {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(self.dir.join(f));
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
