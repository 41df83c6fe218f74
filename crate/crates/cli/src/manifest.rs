use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use emitgen::graphs::{write_graph, Graph};

/// Written next to every output artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_hash: Option<String>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs besides the duration.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, graph: Option<&Graph>, elapsed: Duration) -> RunManifest {
        RunManifest {
            command: command.into(),
            arguments: std::env::args().skip(1).collect(),
            seed,
            graph_hash: graph.map(graph_hash),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            wall_clock_seconds: elapsed.as_secs_f64(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests serialize") + "\n"
    }
}

/// SHA-256 of the normalised graph document.
pub fn graph_hash(g: &Graph) -> String {
    hex::encode(Sha256::digest(write_graph(g).as_bytes()))
}
