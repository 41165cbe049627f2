//! Run manifests: what was run, on which inputs, and what it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: digest(bytes),
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: u32,
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    /// Working directory the arguments are relative to.
    pub cwd: String,
    pub parameters: serde_json::Value,
    pub threads: Option<usize>,
    pub inputs: Vec<FileDigest>,
    /// Output paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
    pub wall_time_s: f64,
    pub exit_code: i32,
    pub message: Option<String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if m.format != MANIFEST_FORMAT {
            return Err(format!("{}: unsupported manifest format {}", path.display(), m.format));
        }
        Ok(m)
    }
}

/// Files touched by one run.
#[derive(Debug)]
pub struct Run {
    pub out: PathBuf,
    pub manifest_path: PathBuf,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl Run {
    pub fn in_dir(out: &Path) -> Self {
        Self {
            out: out.to_path_buf(),
            manifest_path: out.join("manifest.json"),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn read_input(&mut self, path: &Path) -> std::io::Result<String> {
        let bytes = fs::read(path)?;
        self.inputs.push(FileDigest::of(path, &bytes));
        String::from_utf8(bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    /// Writes `contents` under the output directory.
    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        let path = self.out.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, contents)?;
        self.outputs.push(FileDigest::of(Path::new(name), contents.as_bytes()));
        Ok(())
    }

    /// Writes `contents` to an explicit path, recorded relative to the output directory when possible.
    pub fn write_path(&mut self, path: &Path, contents: &str) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, contents)?;
        let shown = path.strip_prefix(&self.out).unwrap_or(path);
        self.outputs.push(FileDigest::of(shown, contents.as_bytes()));
        Ok(())
    }
}
