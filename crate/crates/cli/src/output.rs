use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

/// Tags a library error with the flag or file it came from.
pub fn at(flag: &str) -> impl Fn(dpart::Error) -> Failure + '_ {
    move |e| {
        let code = if e.is_validation() { EXIT_USAGE } else { EXIT_RUNTIME };
        Failure {
            code,
            message: format!("{flag}: {e}"),
        }
    }
}

pub fn io_at(flag: &str) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::runtime(format!("{flag}: {e}"))
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let shown = path.display().to_string();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_at(&shown))?;
    tmp.write_all(bytes).map_err(io_at(&shown))?;
    tmp.as_file().sync_all().map_err(io_at(&shown))?;
    tmp.persist(path)
        .map_err(|e| Failure::runtime(format!("{shown}: {}", e.error)))?;
    Ok(())
}

/// Like [`write_atomic`], with "-" meaning standard output.
pub fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush()).map_err(io_at("stdout"))
    } else {
        write_atomic(path, bytes)
    }
}
