//! Input digests, guarded output writes and run metadata.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "tensornet";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Bookkeeping for one command invocation.
pub struct Run {
    command: &'static str,
    config: Value,
    force: bool,
    inputs: Vec<InputDigest>,
    outputs: Vec<PathBuf>,
}

impl Run {
    pub fn new(command: &'static str, config: Value, force: bool) -> Self {
        Self { command, config, force, inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn read(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        Ok(bytes)
    }

    pub fn read_string(&mut self, path: &Path) -> CliResult<String> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes).map_err(|e| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
    }

    /// Records a value resolved at run time (a defaulted step size, say)
    /// alongside the command-line configuration.
    pub fn resolve(&mut self, key: &str, value: Value) {
        if let Some(map) = self.config.as_object_mut() {
            map.insert(key.to_string(), value);
        }
    }

    pub fn inputs(&self) -> &[InputDigest] {
        &self.inputs
    }

    /// Refuses to replace an existing file unless `--force` was given.
    pub fn check_writable(&self, path: &Path) -> CliResult<()> {
        if path.exists() && !self.force {
            return Err(CliError::OutputExists(path.to_path_buf()));
        }
        Ok(())
    }

    pub fn write(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
        self.check_writable(path)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Deterministic provenance block: tool, version, resolved configuration
    /// and input digests.
    pub fn metadata(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
        })
    }

    /// Writes `<primary>.meta.json` next to the first output. The wall-clock
    /// time lives only here, under `non_deterministic`.
    pub fn finish(mut self, primary: &Path) -> CliResult<()> {
        let mut meta = self.metadata();
        meta["outputs"] = json!(self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>());
        meta["non_deterministic"] = json!({ "written_at": now_rfc3339() });
        let sidecar = sidecar_path(primary);
        let text = serde_json::to_string_pretty(&meta)? + "\n";
        self.write(&sidecar, text)
    }
}

pub fn sidecar_path(primary: &Path) -> PathBuf {
    let mut name = primary.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    primary.with_file_name(name)
}

fn now_rfc3339() -> String {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    chrono::DateTime::from_timestamp(d.as_secs() as i64, d.subsec_nanos())
        .map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .unwrap_or_default()
}

/// `{"metadata": ..., <report fields>}` as pretty JSON.
pub fn report_json<T: Serialize>(run: &Run, report: &T) -> CliResult<String> {
    let mut value = serde_json::to_value(report)?;
    let body = match value.as_object_mut() {
        Some(map) => {
            let mut meta = run.metadata();
            // report-level annotations join the run metadata
            if let Some(Value::Object(extra)) = map.remove("metadata") {
                meta.as_object_mut().expect("object").extend(extra);
            }
            let mut out = serde_json::Map::new();
            out.insert("metadata".into(), meta);
            out.append(map);
            Value::Object(out)
        }
        None => json!({ "metadata": run.metadata(), "result": value }),
    };
    Ok(serde_json::to_string_pretty(&body)? + "\n")
}

pub fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}
