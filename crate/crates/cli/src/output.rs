//! Deterministic tabular output: CSV with comment headers, JSON with
//! provenance fields, and bit-stable float formatting.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct OutputCtx {
    pub dir: PathBuf,
    pub format: Format,
    pub reproducible: bool,
    pub config_hash: String,
    written: std::cell::RefCell<Vec<String>>,
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// JSON number that degrades non-finite values to null (JSON has no
/// representation for them).
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

impl OutputCtx {
    pub fn new(
        dir: &Path,
        format: Format,
        reproducible: bool,
        config_hash: &str,
    ) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputCtx {
            dir: dir.to_path_buf(),
            format,
            reproducible,
            config_hash: config_hash.to_string(),
            written: std::cell::RefCell::new(Vec::new()),
        })
    }

    pub fn written_files(&self) -> Vec<String> {
        self.written.borrow().clone()
    }

    fn note(&self, path: &Path) {
        self.written.borrow_mut().push(path.display().to_string());
    }

    fn timestamp(&self) -> Option<u64> {
        if self.reproducible {
            None
        } else {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs())
        }
    }

    /// Writes a CSV file prefixed with `#` comment lines carrying the
    /// config hash (always) and a timestamp (suppressed under
    /// `--reproducible`), then extra comments, header, and rows.
    pub fn write_csv(
        &self,
        name: &str,
        extra_comments: &[String],
        header: &str,
        rows: &[String],
    ) -> Result<PathBuf, CliError> {
        let mut text = String::new();
        text.push_str(&format!("# config_hash={}\n", self.config_hash));
        if let Some(ts) = self.timestamp() {
            text.push_str(&format!("# generated_at_unix={ts}\n"));
        }
        for comment in extra_comments {
            text.push_str(&format!("# {comment}\n"));
        }
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = self.dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.note(&path);
        Ok(path)
    }

    /// Writes a JSON object with provenance fields injected.
    pub fn write_json(&self, name: &str, mut value: Value) -> Result<PathBuf, CliError> {
        if let Value::Object(map) = &mut value {
            map.insert("config_hash".to_string(), json!(self.config_hash));
            if let Some(ts) = self.timestamp() {
                map.insert("generated_at_unix".to_string(), json!(ts));
            }
        }
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(&value)
            .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
        std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.note(&path);
        Ok(path)
    }
}
