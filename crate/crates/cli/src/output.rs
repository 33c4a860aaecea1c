use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::run::{Cell, RunOutput, Table, SCHEMA_VERSION};

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "DUALFEM_OUT";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Num(v) => format_number(*v),
        Cell::Empty => String::new(),
    }
}

pub fn write_table(dir: &Path, table: &Table) -> CliResult<PathBuf> {
    let path = dir.join(format!("{}.csv", table.name));
    let ctx = format!("writing {}", path.display());
    let file = fs::File::create(&path).map_err(|e| CliError::io(&ctx, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{}", table.header.join(","))?;
        for row in &table.rows {
            let line: Vec<String> = row.iter().map(format_cell).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()
    };
    emit().map_err(|e| CliError::io(&ctx, e))?;
    Ok(path)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serialises");
    fs::write(path, text + "\n").map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

/// Writes every table and `summary.json`; returns the paths written.
pub fn write_output(dir: &Path, output: &RunOutput) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))?;
    let mut paths = Vec::new();
    for t in &output.tables {
        paths.push(write_table(dir, t)?);
    }
    let summary = dir.join("summary.json");
    write_json(&summary, &output.summary)?;
    paths.push(summary);
    Ok(paths)
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    schema_version: u32,
    label: &'a str,
    class: &'static str,
    exit_code: i32,
    message: &'a str,
}

/// Structured failure record written in place of a summary.
pub fn write_error(dir: &Path, label: &str, err: &CliError) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))?;
    let path = dir.join("error.json");
    let record = ErrorRecord {
        schema_version: SCHEMA_VERSION,
        label,
        class: err.class.label(),
        exit_code: err.exit_code(),
        message: &err.message,
    };
    write_json(&path, &record)?;
    Ok(path)
}

/// Output directory by precedence: explicit flag, environment, config,
/// then `out/<label>`.
pub fn resolve_out_dir(flag: Option<&Path>, env: Option<&str>, config: Option<&Path>, label: &str) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(e) = env.filter(|e| !e.is_empty()) {
        return PathBuf::from(e).join(label);
    }
    if let Some(p) = config {
        return p.to_path_buf();
    }
    PathBuf::from("out").join(label)
}
