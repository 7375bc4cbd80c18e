//! Output plumbing: deterministic CSV/JSON emission and the config hash
//! recorded in every artifact so results can be traced back to their run.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// 64-bit FNV-1a over the raw config bytes: cheap, stable across platforms,
/// and good enough to tell two configs apart in output metadata.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// One CSV cell: a float printed with 17 significant digits, or absent.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Value(f64),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Value(v) => format!("{v:.16e}"),
            Cell::Missing => "nan".to_string(),
        }
    }
}

/// Metadata stamped into every artifact.
#[derive(Debug, Clone)]
pub struct RunStamp {
    pub version: &'static str,
    pub config_hash: u64,
    pub seed: Option<u64>,
}

impl RunStamp {
    fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# nshwave {}", self.version),
            format!("# config-hash: {:016x}", self.config_hash),
        ];
        if let Some(seed) = self.seed {
            lines.push(format!("# seed: {seed}"));
        }
        lines
    }
}

/// Writes a CSV table: '#' metadata lines, a header row, then data rows with
/// every float at 17 significant digits. `path = None` writes to stdout.
pub fn write_csv(
    path: Option<&Path>,
    stamp: &RunStamp,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    let mut text = String::new();
    for line in stamp.comment_lines() {
        text.push_str(&line);
        text.push('\n');
    }
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        text.push_str(&rendered.join(","));
        text.push('\n');
    }
    emit(path, text.as_bytes())
}

/// Writes a JSON report (pretty-printed, trailing newline). `path = None`
/// writes to stdout.
pub fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numeric(format!("serializing report: {e}")))?;
    text.push('\n');
    emit(path, text.as_bytes())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent).map_err(|e| {
                        CliError::Numeric(format!("creating {}: {e}", parent.display()))
                    })?;
                }
            }
            fs::write(p, bytes)
                .map_err(|e| CliError::Numeric(format!("writing {}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Numeric(format!("writing to stdout: {e}"))),
    }
}

/// Reads a '#'-commented CSV of floats: returns (header, rows). This is the
/// same dialect [`write_csv`] emits, so the tool can re-read its own output.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header.is_none() {
            header = Some(line.split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => {
                return Err(CliError::Config(format!(
                    "{}:{}: unparseable number: {e}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    let header = header
        .ok_or_else(|| CliError::Config(format!("{}: no header row found", path.display())))?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CliError::Config(format!(
                "{}: row {} has {} cells but the header has {}",
                path.display(),
                i + 1,
                row.len(),
                header.len()
            )));
        }
    }
    Ok((header, rows))
}

/// Resolves an output file inside the configured directory.
pub fn in_directory(dir: &Path, file: &str) -> PathBuf {
    dir.join(file)
}
