//! CSV series and JSON summaries named by a hash of the configuration.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::experiments::{Report, Table};

/// First 16 hex digits of SHA-256 over the canonical config text, without
/// the output directory.
pub fn params_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.out_dir = None;
    let digest = Sha256::digest(c.to_text().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn table_path(dir: &Path, kind: &str, hash: &str, table: &Table) -> PathBuf {
    if table.suffix.is_empty() {
        dir.join(format!("{kind}_{hash}.csv"))
    } else {
        dir.join(format!("{kind}_{hash}_{}.csv", table.suffix))
    }
}

pub fn write_csv(path: &Path, table: &Table) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(number).unwrap_or_default()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn summary_json(cfg: &ExperimentConfig, report: &Report, files: &[PathBuf]) -> Value {
    let checks = |list: &[crate::experiments::Check]| {
        list.iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
            .collect::<Vec<_>>()
    };
    json!({
        "kind": report.kind,
        "hash": params_hash(cfg),
        "config": cfg,
        "files": files.iter().map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned())).collect::<Vec<_>>(),
        "result": report.summary,
        "checks": checks(&report.checks),
        "verdicts": checks(&report.verdicts),
        "validated": report.validated(),
    })
}

/// Writes every table and `summary_<hash>.json`; returns their paths.
pub fn write_report(dir: &Path, cfg: &ExperimentConfig, report: &Report) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let hash = params_hash(cfg);
    let mut files = Vec::new();
    for table in &report.tables {
        let path = table_path(dir, report.kind.name(), &hash, table);
        write_csv(&path, table)?;
        files.push(path);
    }
    let summary = summary_json(cfg, report, &files);
    let path = dir.join(format!("summary_{hash}.json"));
    let mut text = serde_json::to_string_pretty(&summary).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(&path, text)?;
    files.push(path);
    Ok(files)
}
