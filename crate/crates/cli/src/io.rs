//! Schema-versioned JSON input and atomic output.

use crate::error::CliError;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u64 = 1;

/// Reads a JSON document, checks its "v" field when present and returns the
/// remaining object.
pub fn read_value(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not JSON: {e}", path.display())))?;
    if let Value::Object(obj) = &mut value {
        if let Some(v) = obj.remove("v") {
            if v.as_u64() != Some(SCHEMA_VERSION) {
                return Err(CliError::Input(format!(
                    "{} has schema version {v}, expected {SCHEMA_VERSION}",
                    path.display()
                )));
            }
        }
    }
    Ok(value)
}

pub fn from_value<T: DeserializeOwned>(value: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("bad {what}: {e}")))
}

pub fn read<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    from_value(read_value(path)?, what)
}

/// A JSON object tagged with the schema version. Keys are kept sorted so the
/// bytes depend only on the content.
pub struct Doc(Map<String, Value>);

impl Doc {
    pub fn new(command: &str) -> Self {
        let mut m = Map::new();
        m.insert("v".into(), Value::from(SCHEMA_VERSION));
        m.insert("command".into(), Value::from(command));
        Doc(m)
    }

    pub fn set<T: serde::Serialize>(&mut self, key: &str, value: T) -> Result<&mut Self, CliError> {
        let v = serde_json::to_value(value)
            .map_err(|e| CliError::Input(format!("cannot serialize {key}: {e}")))?;
        self.0.insert(key.into(), v);
        Ok(self)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&self.0).expect("a JSON map always serializes");
        out.push(b'\n');
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, &self.to_bytes())
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
