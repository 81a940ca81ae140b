use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// Record of one run, written next to its CSV files as `<subcommand>.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub subcommand: &'a str,
    /// Every flag of the subcommand, defaults included.
    pub parameters: &'a P,
    /// Base seed of Monte Carlo runs; null for deterministic subcommands.
    pub seed: Option<u64>,
    pub workers: usize,
    pub tool_version: &'a str,
    /// RFC 3339 timestamps.
    pub started_at: String,
    pub finished_at: String,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl<P: Serialize> RunManifest<'_, P> {
    pub fn write(&self, dir: &Path) -> io::Result<String> {
        let name = format!("{}.json", self.subcommand);
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(dir.join(&name), text)?;
        Ok(name)
    }
}
