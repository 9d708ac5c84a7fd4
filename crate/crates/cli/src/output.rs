//! Reproducible file output: every data file carries its manifest as
//! `#`-prefixed comment lines and is accompanied by a JSON sidecar.
//!
//! The embedded comments exclude the timestamp so that identical flag sets
//! produce byte-identical data files; the sidecar carries the full manifest.

use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Vec<(String, String)>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// Open a CSV file and write the manifest comments plus the header row.
pub fn csv_writer(
    path: &Path,
    manifest: &RunManifest,
    header: &str,
) -> std::io::Result<BufWriter<File>> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# command: {}", manifest.command)?;
    writeln!(w, "# tool_version: {}", manifest.tool_version)?;
    for (key, value) in &manifest.parameters {
        writeln!(w, "# {key}: {value}")?;
    }
    writeln!(w, "{header}")?;
    Ok(w)
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Write the JSON sidecar carrying the manifest and any extra payload.
pub fn write_sidecar<T: Serialize>(out: &Path, payload: &T) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(sidecar_path(out))?);
    serde_json::to_writer_pretty(&mut w, payload)?;
    writeln!(w)?;
    Ok(())
}
