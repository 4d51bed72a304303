//! The run manifest: config echo, timing, the tolerance table, the verdict
//! summary, and a checksummed inventory of every emitted artifact.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactEntry {
    /// Path relative to the run directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Subcommand that produced the run.
    pub command: String,
    /// Full text of the parsed config.
    pub config_echo: String,
    /// Unix epoch seconds.
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Named tolerances in force (from `tol::table`).
    pub tolerances: Vec<(String, f64)>,
    /// Free-form verdict summary of the run.
    pub verdict: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
    /// SHA-256 over the artifact inventory lines, so the manifest pins the
    /// exact bytes of everything it lists.
    pub manifest_checksum: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, config_echo: String) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_echo,
            started_unix: now_unix(),
            finished_unix: 0,
            tolerances: crate::tol::table()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            verdict: serde_json::Value::Null,
            artifacts: Vec::new(),
            manifest_checksum: String::new(),
        }
    }

    /// Record an artifact the caller just wrote.
    pub fn add_artifact(&mut self, rel_path: &str, contents: &[u8]) {
        self.artifacts.push(ArtifactEntry {
            path: rel_path.to_string(),
            sha256: sha256_hex(contents),
        });
    }

    pub fn set_verdict(&mut self, verdict: serde_json::Value) {
        self.verdict = verdict;
    }

    fn inventory_digest(&self) -> String {
        let mut lines = String::new();
        for a in &self.artifacts {
            lines.push_str(&a.path);
            lines.push(':');
            lines.push_str(&a.sha256);
            lines.push('\n');
        }
        sha256_hex(lines.as_bytes())
    }

    /// Stamp the end time and the inventory checksum, then serialize.
    pub fn finalize(&mut self) -> String {
        self.finished_unix = now_unix();
        self.manifest_checksum = self.inventory_digest();
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn write(&mut self, dir: impl AsRef<Path>) -> Result<()> {
        let text = self.finalize();
        std::fs::write(dir.as_ref().join("manifest.json"), text)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| crate::error::HwmError::Snapshot(format!("manifest parse: {e}")))
    }

    /// Re-hash every listed artifact under `dir` and compare with the
    /// recorded inventory. Returns the first mismatch, if any.
    pub fn verify_artifacts(&self, dir: impl AsRef<Path>) -> Result<Option<String>> {
        for a in &self.artifacts {
            let bytes = std::fs::read(dir.as_ref().join(&a.path))?;
            if sha256_hex(&bytes) != a.sha256 {
                return Ok(Some(a.path.clone()));
            }
        }
        if self.manifest_checksum != self.inventory_digest() {
            return Ok(Some("manifest_checksum".to_string()));
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_covers_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("simulate", "[grid]\n".into());
        std::fs::write(dir.path().join("a.csv"), b"x,y\n1,2\n").unwrap();
        m.add_artifact("a.csv", b"x,y\n1,2\n");
        m.set_verdict(serde_json::json!({"pass": true}));
        m.write(dir.path()).unwrap();

        let loaded = RunManifest::read(dir.path().join("manifest.json")).unwrap();
        assert_eq!(loaded.verify_artifacts(dir.path()).unwrap(), None);

        // tamper with the artifact: the inventory catches it
        std::fs::write(dir.path().join("a.csv"), b"x,y\n9,9\n").unwrap();
        assert_eq!(
            loaded.verify_artifacts(dir.path()).unwrap(),
            Some("a.csv".to_string())
        );
    }

    #[test]
    fn sha256_is_the_reference_value() {
        // sha256("abc") is a published constant
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
