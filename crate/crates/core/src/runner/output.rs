use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Component, Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

/// A file written by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Record of one run; written once, never overwritten.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub master_seed: u64,
    pub parameters: ExperimentConfig,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputFile>,
    /// Every numerical check passed.
    pub passed: bool,
    pub findings: Vec<String>,
}

impl RunManifest {
    /// Checksums of the CSV outputs, in write order.
    pub fn csv_checksums(&self) -> Vec<(&str, &str)> {
        self.outputs
            .iter()
            .filter(|f| f.path.ends_with(".csv"))
            .map(|f| (f.path.as_str(), f.sha256.as_str()))
            .collect()
    }
}

/// Writer confined to one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    fn resolve(&self, name: &str) -> Result<PathBuf> {
        let rel = Path::new(name);
        if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
            return Err(Error::Usage(format!("output name {name:?} leaves the output directory")));
        }
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        Ok(path)
    }

    fn register(&mut self, name: &str, bytes: &[u8]) {
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.resolve(name)?;
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.register(name, bytes);
        Ok(())
    }

    /// Writes a CSV table; numbers use the shortest round-trip decimal form.
    pub fn write_csv<R, I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        R: AsRef<[f64]>,
        I: IntoIterator<Item = R>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Usage(format!("csv encoding of {name}: {e}"));
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(row.as_ref().iter().map(|x| x.to_string())).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Usage(format!("csv buffer of {name}: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// Stores `manifest` under `dir` as the next free `manifest-NNN.json`.
    pub fn write_manifest(&self, dir: &str, manifest: &RunManifest) -> Result<PathBuf> {
        let base = self.resolve(dir)?;
        fs::create_dir_all(&base).map_err(|e| Error::io(&base, e))?;
        let bytes = serde_json::to_vec_pretty(manifest)?;
        for seq in 0.. {
            let path = base.join(format!("manifest-{seq:03}.json"));
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    f.write_all(&bytes).map_err(|e| Error::io(&path, e))?;
                    return Ok(path);
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(Error::io(&path, e)),
            }
        }
        unreachable!("manifest sequence exhausted")
    }
}

/// Reads a manifest back.
pub fn read_manifest(path: &Path) -> Result<serde_json::Value> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(f)?)
}
