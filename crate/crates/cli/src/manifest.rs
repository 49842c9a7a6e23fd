//! Run manifests: every subcommand records its inputs (with content
//! digests), effective configuration, and output digests, enough to
//! reproduce the run bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::CliError;

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: ToolInfo,
    pub command: String,
    pub inputs: Vec<FileDigest>,
    pub seeds: Vec<String>,
    pub class_names: Option<Vec<String>>,
    pub method: Option<String>,
    pub config: serde_json::Value,
    pub rng_seeds: Vec<u64>,
    pub delimiter: String,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: ToolInfo {
                name: "stancewalk",
                version: env!("CARGO_PKG_VERSION"),
            },
            command: command.to_string(),
            inputs: Vec::new(),
            seeds: Vec::new(),
            class_names: None,
            method: None,
            config: serde_json::Value::Null,
            rng_seeds: Vec::new(),
            delimiter: ",".to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(digest_file(path)?);
        Ok(())
    }

    /// Record an output file. Paths inside `base` (the manifest's own
    /// directory) are stored relative to it, so identically configured
    /// runs yield byte-identical manifests wherever they land.
    pub fn add_output(&mut self, path: &Path, base: &Path) -> Result<(), CliError> {
        let mut digest = digest_file(path)?;
        if let Ok(relative) = path.strip_prefix(base) {
            digest.path = relative.display().to_string();
        }
        self.outputs.push(digest);
        Ok(())
    }

    /// Write `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::domain(format!("serializing manifest: {e}")))?;
        let mut file = File::create(&path)
            .map_err(|e| CliError::io(format!("creating {}: {e}", path.display())))?;
        file.write_all(text.as_bytes())
            .and_then(|_| file.write_all(b"\n"))
            .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))
    }
}

pub fn digest_file(path: &Path) -> Result<FileDigest, CliError> {
    let mut file =
        File::open(path).map_err(|e| CliError::io(format!("opening {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buffer = [0u8; 64 * 1024];
    loop {
        let n = file
            .read(&mut buffer)
            .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
        if n == 0 {
            break;
        }
        hasher.update(&buffer[..n]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write as _;
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex,
    })
}
