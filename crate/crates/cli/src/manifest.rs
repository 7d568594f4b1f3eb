//! Run manifests written next to every artifact.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub precision_bits: Option<u32>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
    pub version: String,
}

/// Collects the manifest of one command while it runs.
pub struct Recorder {
    manifest: RunManifest,
    started: Instant,
}

impl Recorder {
    pub fn new(command: &str, precision_bits: Option<u32>) -> Self {
        Recorder {
            manifest: RunManifest {
                command: command.to_string(),
                parameters: BTreeMap::new(),
                precision_bits,
                inputs: Vec::new(),
                outputs: Vec::new(),
                wall_clock_seconds: 0.0,
                version: VERSION.to_string(),
            },
            started: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.manifest.parameters.insert(key.to_string(), v);
        self
    }

    pub fn input(&mut self, path: &Path) -> &mut Self {
        self.manifest.inputs.push(path.to_path_buf());
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.manifest.outputs.push(path.to_path_buf());
        self
    }

    /// Writes `<artifact>.manifest.json` for every recorded output.
    pub fn finish(mut self) -> io::Result<RunManifest> {
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        for out in &self.manifest.outputs {
            fs::write(sidecar(out), &text)?;
        }
        Ok(self.manifest)
    }
}

/// `<artifact>.manifest.json`.
pub fn sidecar(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn read_manifest(path: &Path) -> io::Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(io::Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar(Path::new("out/zeros.txt")), PathBuf::from("out/zeros.txt.manifest.json"));
    }

    #[test]
    fn manifest_round_trips() {
        let mut r = Recorder::new("gen", None);
        r.param("n", 5).param("kind", "partition").output(Path::new("f5.txt"));
        let m = r.manifest.clone();
        let text = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.parameters["n"], Value::from(5));
    }
}
