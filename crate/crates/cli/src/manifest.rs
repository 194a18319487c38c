//! Run manifests: everything needed to reproduce an output file byte for
//! byte, including the contents of every input file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::error::Failure;
use crate::run::Inputs;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub command: Command,
    /// Parsed problem or scan configuration after defaults and overrides.
    pub resolved: serde_json::Value,
    pub inputs: Inputs,
    pub outputs: Vec<PathBuf>,
}

pub fn path_for(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn new(cmd: &Command, inputs: &Inputs, resolved: serde_json::Value, out: &Path) -> Self {
        Self {
            tool: "qland".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: cmd.name().into(),
            seed: cmd.seed(),
            command: cmd.clone(),
            resolved,
            inputs: inputs.clone(),
            outputs: vec![out.to_path_buf()],
        }
    }

    pub fn to_json(&self) -> Result<String, Failure> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Failure::Config(format!("cannot serialize manifest: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("invalid manifest {}: {e}", path.display())))
    }
}
