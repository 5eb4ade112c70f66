//! Sample files: one real per line, `#` starts a comment, blank lines ignored.

use std::path::Path;

use crate::error::{CliError, Result};

pub fn parse_samples(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |reason: String| CliError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let v: f64 = line
            .parse()
            .map_err(|_| parse_err(format!("expected one real number, found `{line}`")))?;
        if !v.is_finite() {
            return Err(parse_err(format!("sample must be finite, found `{line}`")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: text.lines().count().max(1),
            reason: "no samples in file".into(),
        });
    }
    Ok(out)
}

pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_samples(&text, path)
}
