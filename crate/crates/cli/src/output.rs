//! Result files, run manifests and atomic writes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const MANIFEST_VERSION: u32 = 1;

/// Everything needed to reproduce one result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub subcommand: String,
    /// Column schema of the result file, e.g. `decode/v1`.
    pub schema: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    /// Arguments after the program name, with the seed made explicit.
    pub argv: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    with_suffix(out, ".manifest.json")
}

pub fn hints_path(out: &Path) -> PathBuf {
    with_suffix(out, ".gp")
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes every file to a temporary sibling first and renames them only
/// once all writes succeeded, so a failure leaves no partial results.
pub fn write_atomically(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut staged = Vec::new();
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot create a file in {}", dir.display()))?;
        tmp.write_all(bytes)?;
        tmp.flush()?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}
