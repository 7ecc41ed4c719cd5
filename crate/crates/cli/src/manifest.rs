use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub bytes: u64,
    /// FNV-1a 64 of the file contents, hex.
    pub fnv1a64: String,
}

impl InputFile {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let content = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let h = content.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        Ok(Self { path: path.to_path_buf(), bytes: content.len() as u64, fnv1a64: format!("{h:016x}") })
    }
}

/// Everything needed to rerun a command: its arguments, the resolved
/// settings derived from them and the inputs it read.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, A: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: &'a A,
    pub resolved: R,
    pub inputs: Vec<InputFile>,
}

impl<'a, A: Serialize, R: Serialize> RunManifest<'a, A, R> {
    pub fn new(command: &'static str, args: &'a A, resolved: R, inputs: Vec<InputFile>) -> Self {
        Self { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), command, args, resolved, inputs }
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        write_json(&dir.join("manifest.json"), self)
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
