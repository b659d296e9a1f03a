use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Everything needed to regenerate an output file.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub command: &'static str,
    pub version: &'static str,
    pub parameters: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<&'static str>,
    pub columns: Vec<String>,
}

pub struct Output {
    pub body: Vec<u8>,
    pub meta: Meta,
}

/// Write to a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path.display(), e.kind()))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path.display(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path.display(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path.display(), e.error.kind()))?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = OsString::from(path.as_os_str());
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn emit(out: Option<&Path>, output: &Output) -> CliResult<()> {
    match out {
        Some(path) => {
            write_atomic(path, &output.body)?;
            let mut meta = serde_json::to_string_pretty(&output.meta).expect("metadata serializes");
            meta.push('\n');
            write_atomic(&sidecar_path(path), meta.as_bytes())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&output.body).and_then(|_| stdout.flush()).map_err(|e| CliError::io("stdout", e))
        }
    }
}
