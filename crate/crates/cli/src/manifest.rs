use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(bytes)),
        }
    }
}

/// Written next to every output file. Two runs whose manifests agree apart
/// from `duration_seconds` produce identical outputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: u64, inputs: Vec<InputDigest>, duration_seconds: f64) -> Self {
        RunManifest {
            command: command.into(),
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            inputs,
            duration_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        let d = InputDigest::of(Path::new("x.json"), b"");
        assert_eq!(
            d.sha256,
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn json_has_all_fields() {
        let m = RunManifest::new("verify", serde_json::json!({"trials": 100}), 7, vec![], 0.5);
        let v: Value = serde_json::from_str(&m.to_json()).unwrap();
        for key in ["command", "parameters", "seed", "version", "inputs", "duration_seconds"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["parameters"]["trials"], 100);
    }
}
