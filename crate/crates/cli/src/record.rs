use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::TOOL_VERSION;

/// A replayable account of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub command: String,
    pub input: Value,
    pub output: Value,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunRecord {
    pub fn new(command: &str, input: Value, output: Value, seeds: Vec<u64>) -> Self {
        let mut r = RunRecord {
            run_id: String::new(),
            command: command.to_string(),
            input,
            output,
            seeds,
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        r.run_id = r.content_hash();
        r
    }

    /// SHA-256 over everything except the id and the timestamp.
    pub fn content_hash(&self) -> String {
        let body = json!({
            "command": self.command,
            "input": self.input,
            "output": self.output,
            "seeds": self.seeds,
            "tool_version": self.tool_version,
        });
        hex::encode(Sha256::digest(body.to_string().as_bytes()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }
}
