//! Row-oriented output in CSV, JSON, or aligned-table form.
//!
//! CSV column order is the record's field order and is fixed per
//! subcommand; JSON is an array of flat records with the same fields.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::OutputFormat;

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().context("csv flush")?;
    String::from_utf8(bytes).context("csv output is utf-8")
}

pub fn to_json_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut out = serde_json::to_string_pretty(rows)?;
    out.push('\n');
    Ok(out)
}

/// Aligned table built from the CSV form, so the column order matches.
pub fn to_pretty_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let csv_text = to_csv_string(rows)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(csv_text.as_bytes());
    let table: Vec<Vec<String>> = reader
        .records()
        .map(|r| Ok(r?.iter().map(str::to_string).collect()))
        .collect::<Result<_>>()?;
    if table.is_empty() {
        return Ok(String::new());
    }
    let columns = table.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in &table {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (ri, row) in table.iter().enumerate() {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:<width$}", width = widths[i]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if ri == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (columns - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn render<T: Serialize>(rows: &[T], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv_string(rows),
        OutputFormat::Json => to_json_string(rows),
        OutputFormat::Pretty => to_pretty_string(rows),
    }
}

/// Writes to the path when given, otherwise to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write output to {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
