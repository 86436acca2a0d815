//! Runs every job file of a directory and writes one report per job.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

use profinity_core::par;

use crate::job::{parse_job, Format};
use crate::render::{render_report, to_json_text};
use crate::run::run_job;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchEntry {
    pub job: PathBuf,
    pub report: PathBuf,
    pub status: String,
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn job_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn run_one(path: &Path, out_dir: &Path, format: Format) -> Result<BatchEntry> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("job");
    let ext = match format {
        Format::Json => "json",
        Format::Table => "txt",
    };
    let report_path = out_dir.join(format!("{stem}.{ext}"));
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (body, status) = match parse_job(&text) {
        Ok(spec) => {
            let r = run_job(&spec);
            let status = if r.is_ok() { "ok" } else { "error" };
            (render_report(&r, format), status.to_string())
        }
        Err(e) => {
            let doc = serde_json::json!({"status": "invalid", "violations": e.violations});
            let body = match format {
                Format::Json => to_json_text(&doc),
                Format::Table => format!("status        invalid\n{}\n", e.violations.join("\n")),
            };
            (body, "invalid".to_string())
        }
    };
    write_atomic(&report_path, &body)?;
    Ok(BatchEntry { job: path.to_path_buf(), report: report_path, status })
}

/// Runs all `*.json` jobs of `dir` concurrently; reports go to `out_dir`.
pub fn run_batch(dir: &Path, out_dir: &Path, format: Format) -> Result<Vec<BatchEntry>> {
    let files = job_files(dir)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    par::map(&files, |p| run_one(p, out_dir, format)).into_iter().collect()
}
