pub mod buckle;
pub mod fit;
pub mod pipeline;
pub mod tables;
pub mod update;

use crate::errors::CmdError;
use std::path::Path;

pub(crate) fn require_seed(seed: Option<u64>) -> Result<u64, CmdError> {
    seed.ok_or_else(|| CmdError::Other("--seed is required (no entropy defaults)".into()))
}

pub(crate) fn require_out(out: Option<&Path>) -> Result<&Path, CmdError> {
    let dir = out.ok_or_else(|| CmdError::Other("--out directory is required".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| CmdError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

pub(crate) fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CmdError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CmdError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}
