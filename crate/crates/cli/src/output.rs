use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Provenance block embedded in every artifact. Carries no timestamps so
/// reruns are byte-identical.
pub fn meta<C: Serialize>(command: &str, config: &C, seed: Option<u64>) -> Value {
    json!({
        "tool": "asdim",
        "version": asdim::VERSION,
        "command": command,
        "config": serde_json::to_value(config).unwrap_or(Value::Null),
        "seed": seed,
    })
}

/// `# ` comment lines for CSV and graph files.
pub fn comment_lines(meta: &Value) -> Vec<String> {
    vec![
        format!("asdim {} {}", meta["version"].as_str().unwrap_or(""), meta["command"].as_str().unwrap_or("")),
        format!("config {}", meta["config"]),
        format!("seed {}", meta["seed"]),
    ]
}

pub fn with_meta<T: Serialize>(body: &T, meta: Value) -> Result<String, CliError> {
    let mut value = serde_json::to_value(body)?;
    if let Value::Object(map) = &mut value {
        map.insert("meta".into(), meta);
    }
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

/// Writes through a sibling temp file and a rename; `None` means stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => write_atomic(path, text),
    }
}

pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let tmp = temp_sibling(path);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::Io(e)
    })
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp-{}", std::process::id()))
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}
