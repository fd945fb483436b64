//! Machine-readable run reports. The payload is the command's result and is
//! byte-for-byte reproducible across deterministic reruns; wall-clock timing
//! lives outside it.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub version: String,
    pub deterministic: bool,
    pub threads: usize,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub payload: serde_json::Value,
    pub elapsed_ms: u64,
    #[serde(skip)]
    started: Instant,
}

impl Report {
    pub fn new(threads: usize, seed: Option<u64>) -> Report {
        Report {
            command: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            deterministic: threads <= 1,
            threads,
            seed,
            inputs: Vec::new(),
            payload: serde_json::Value::Null,
            elapsed_ms: 0,
            started: Instant::now(),
        }
    }

    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<(), std::io::Error> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
        });
        Ok(())
    }

    pub fn set_payload(&mut self, payload: serde_json::Value) {
        self.payload = payload;
    }

    pub fn finish(mut self) -> String {
        self.elapsed_ms = self.started.elapsed().as_millis() as u64;
        serde_json::to_string_pretty(&self).expect("report serialises")
    }
}
