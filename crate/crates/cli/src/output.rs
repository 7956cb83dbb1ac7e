use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Everything needed to regenerate an artifact, stamped into the artifact.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub tool: String,
    pub command: String,
    pub argv: Vec<String>,
    /// Ordered parameter map; keys are stable across versions.
    pub params: BTreeMap<String, String>,
    /// Unix seconds; absent under `--deterministic`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl RunConfig {
    pub fn new(command: &str, deterministic: bool) -> Self {
        let timestamp = (!deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            tool: format!("spectrakit {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            params: BTreeMap::new(),
            timestamp,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.set(key, v);
        }
        self
    }

    /// `# run.<key>=<value>` lines. The `run.` prefix keeps these apart
    /// from keys a payload format defines for itself.
    pub fn preamble(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# run.tool={}\n", self.tool));
        out.push_str(&format!("# run.command={}\n", self.command));
        out.push_str(&format!("# run.argv={}\n", self.argv.join(" ")));
        for (k, v) in &self.params {
            out.push_str(&format!("# run.{k}={v}\n"));
        }
        if let Some(t) = self.timestamp {
            out.push_str(&format!("# run.timestamp={t}\n"));
        }
        out
    }
}

fn cell(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    match s {
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        _ => {}
    }
    if let Ok(i) = s.parse::<i64>() {
        return json!(i);
    }
    match s.parse::<f64>() {
        Ok(f) if f.is_finite() => json!(f),
        _ => Value::String(s.to_string()),
    }
}

/// JSON envelope mirroring a CSV body: the config, the column names and the
/// rows with numeric cells as numbers and empty cells as null.
pub fn json_envelope(cfg: &RunConfig, csv: &str, extra: Option<Value>) -> String {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let columns: Vec<&str> = lines
        .next()
        .map(|h| h.split(',').collect())
        .unwrap_or_default();
    let rows: Vec<Vec<Value>> = lines.map(|l| l.split(',').map(cell).collect()).collect();
    let mut doc = json!({
        "config": cfg,
        "columns": columns,
        "rows": rows,
    });
    if let Some(extra) = extra {
        doc["summary"] = extra;
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("json of plain values");
    s.push('\n');
    s
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::missing(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::missing(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Shared output flags of the report commands.
#[derive(Debug, Clone, clap::Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Emit a JSON envelope instead of CSV.
    #[arg(long)]
    pub json: bool,
}

impl OutputArgs {
    /// Writes `csv` under the preamble, or its JSON mirror.
    pub fn emit(&self, cfg: &RunConfig, csv: &str, summary: Option<Value>) -> Result<(), CliError> {
        let text = if self.json {
            json_envelope(cfg, csv, summary)
        } else {
            let mut t = cfg.preamble();
            if let Some(Value::Object(map)) = &summary {
                for (k, v) in map {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    t.push_str(&format!("# summary.{k}={v}\n"));
                }
            }
            t.push_str(csv);
            t
        };
        write_text(self.output.as_deref(), &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_mirrors_csv() {
        let cfg = RunConfig::new("report spectra", true);
        let s = json_envelope(&cfg, "a,b,c\n1,x,\n2.5,true,-3\n", None);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["columns"], json!(["a", "b", "c"]));
        assert_eq!(v["rows"][0], json!([1, "x", null]));
        assert_eq!(v["rows"][1], json!([2.5, true, -3]));
        assert!(v["config"].get("timestamp").is_none());
    }

    #[test]
    fn preamble_is_prefixed() {
        let mut cfg = RunConfig::new("generate", true);
        cfg.set("seed", 7);
        let p = cfg.preamble();
        assert!(p.lines().all(|l| l.starts_with("# run.")));
        assert!(p.contains("# run.seed=7\n"));
        assert!(!p.contains("timestamp"));
    }
}
