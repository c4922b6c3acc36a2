use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use quenchlab::io::{read_json, write_json};
use quenchlab::Result;
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    /// Fully resolved model, quench and analysis parameters.
    pub config: serde_json::Value,
    pub version: String,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let f = BufWriter::new(File::create(dir.join(MANIFEST_FILE))?);
        write_json(self, f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(File::open(path)?)
    }
}
