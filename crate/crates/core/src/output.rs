//! Provenance headers shared by every report and output file.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "hillspec";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerances used at each layer of a computation. Each layer is loose
/// enough to absorb the error of the one below it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceLadder {
    pub integration: f64,
    pub roots: f64,
    pub identities: f64,
    pub verdicts: f64,
}

impl Default for ToleranceLadder {
    fn default() -> Self {
        ToleranceLadder {
            integration: 1e-10,
            roots: 1e-8,
            identities: 1e-6,
            verdicts: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub tolerances: ToleranceLadder,
}

/// First 16 hex digits of the SHA-256 of the compact JSON text of `config`.
/// Object keys are sorted by `serde_json`, so equal configs hash equally.
pub fn config_hash(config: &serde_json::Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Header {
    pub fn new(config: &serde_json::Value, tolerances: ToleranceLadder) -> Self {
        Header {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            config_hash: config_hash(config),
            tolerances,
        }
    }

    /// `# hillspec <version> config=<hash> tol=<ladder>`
    pub fn comment_line(&self) -> String {
        let t = &self.tolerances;
        format!(
            "# {} {} config={} tol=integration:{:e},roots:{:e},identities:{:e},verdicts:{:e}",
            self.tool, self.version, self.config_hash, t.integration, t.roots, t.identities, t.verdicts
        )
    }

    /// `body` with the comment line prepended.
    pub fn prepend(&self, body: &str) -> String {
        format!("{}\n{body}", self.comment_line())
    }
}
