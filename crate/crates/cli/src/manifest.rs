use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::scenario::ScenarioConfig;

/// Hex SHA-256 of the canonical JSON form of the scenario (sorted keys,
/// output directory excluded).
pub fn config_hash(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let canonical = serde_json::to_string(&serde_json::to_value(cfg)?)?;
    Ok(format!("{:x}", Sha256::digest(canonical.as_bytes())))
}

/// Collects everything a run reports. Only `timings` varies between
/// identical runs.
pub struct Manifest {
    subcommand: &'static str,
    dir: PathBuf,
    sections: BTreeMap<&'static str, Value>,
    outputs: Vec<String>,
    timings: BTreeMap<String, f64>,
    clock: Instant,
}

impl Manifest {
    pub fn new(subcommand: &'static str, cfg: &ScenarioConfig, dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let mut sections = BTreeMap::new();
        sections.insert("inputs", serde_json::to_value(cfg)?);
        sections.insert("config_hash", json!(config_hash(cfg)?));
        Ok(Self { subcommand, dir: dir.to_path_buf(), sections, outputs: Vec::new(), timings: BTreeMap::new(), clock: Instant::now() })
    }

    pub fn set(&mut self, key: &'static str, value: impl Serialize) -> Result<(), CliError> {
        self.sections.insert(key, serde_json::to_value(value)?);
        Ok(())
    }

    /// Records the wall time since the previous lap under `label`.
    pub fn lap(&mut self, label: &str) {
        self.timings.insert(label.to_string(), self.clock.elapsed().as_secs_f64());
        self.clock = Instant::now();
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let path = self.path(name);
        std::fs::write(path, serde_json::to_string_pretty(value)?)?;
        Ok(())
    }

    pub fn write_csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn finish(mut self, status: &str) -> Result<Value, CliError> {
        let mut out = serde_json::Map::new();
        out.insert("tool".into(), json!("plateflow"));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        out.insert("subcommand".into(), json!(self.subcommand));
        out.insert("status".into(), json!(status));
        for (k, v) in std::mem::take(&mut self.sections) {
            out.insert(k.into(), v);
        }
        self.outputs.push("manifest.json".into());
        out.insert("outputs".into(), json!(self.outputs));
        out.insert("timings".into(), json!(self.timings));
        let v = Value::Object(out);
        std::fs::write(self.dir.join("manifest.json"), serde_json::to_string_pretty(&v)?)?;
        Ok(v)
    }
}
