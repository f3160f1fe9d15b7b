//! Run records: the command, its configuration, an input hash, the results
//! payload and the wall time, written next to the results.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: Vec<String>,
    pub config: Value,
    pub input_hash: String,
    pub results: Value,
    pub wall_time_secs: f64,
}

/// Hash of `bytes` framed the way git frames a blob object.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    let digest = h.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn write(
    path: &Path,
    config: Value,
    input: &[u8],
    results: Value,
    elapsed: Duration,
) -> Result<(), CliError> {
    let record = RunRecord {
        command: std::env::args().collect(),
        config,
        input_hash: content_hash(input),
        results,
        wall_time_secs: elapsed.as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&record).expect("record serializes");
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
