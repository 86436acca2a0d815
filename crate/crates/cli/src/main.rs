use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use profinity_cli::batch::{run_batch, write_atomic};
use profinity_cli::selftest::run_selftest;
use profinity_cli::{parse_job, render_report, run_job, Format};

#[derive(Parser)]
#[command(name = "profinity", version, about = "Cohomology of finite and profinite groups from JSON job files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn format_arg(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format {s:?} (table, json)"))
}

#[derive(Subcommand)]
enum Command {
    /// Run one job file.
    Run {
        job: PathBuf,
        /// Output format; defaults to the job's "format" field, then table.
        #[arg(long, value_parser = format_arg)]
        format: Option<Format>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every *.json job in a directory.
    Batch {
        dir: PathBuf,
        /// Report directory [default: <dir>/reports]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = format_arg, default_value = "json")]
        format: Format,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Defaults to json with --out and table otherwise.
        #[arg(long, value_parser = format_arg)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(job: &Path, format: Option<Format>, out: Option<&Path>) -> Result<ExitCode> {
    let text = fs::read_to_string(job).with_context(|| format!("reading {}", job.display()))?;
    let spec = match parse_job(&text) {
        Ok(s) => s,
        Err(e) => {
            for v in &e.violations {
                eprintln!("{}: {v}", job.display());
            }
            return Ok(ExitCode::from(2));
        }
    };
    let report = run_job(&spec);
    let format = format.or(spec.format).unwrap_or(Format::Table);
    emit(out, &render_report(&report, format))?;
    if let Some(e) = report.error() {
        eprintln!("{e}");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn batch(dir: &Path, out: Option<&Path>, format: Format) -> Result<ExitCode> {
    let out_dir = out.map_or_else(|| dir.join("reports"), Path::to_path_buf);
    let entries = run_batch(dir, &out_dir, format)?;
    let mut failed = 0;
    for e in &entries {
        println!("{:<8} {} -> {}", e.status, e.job.display(), e.report.display());
        failed += usize::from(e.status != "ok");
    }
    println!("{} jobs, {failed} not ok", entries.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn selftest(format: Option<Format>, out: Option<&Path>, only: &[usize]) -> Result<ExitCode> {
    let report = run_selftest(only, |r, took| {
        let mark = if r.passed() { "pass" } else { "FAIL" };
        eprintln!("criterion {:>2} {mark} ({} cases, {:.1?})", r.id, r.outcome.cases, took);
    });
    let format = format.unwrap_or(if out.is_some() { Format::Json } else { Format::Table });
    emit(out, &report.render(format))?;
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { job, format, out } => run(job, *format, out.as_deref()),
        Command::Batch { dir, out, format } => batch(dir, out.as_deref(), *format),
        Command::Selftest { format, out, only } => selftest(*format, out.as_deref(), only),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(3)
    })
}
