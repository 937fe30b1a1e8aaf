//! Output formatting shared by all subcommands.
//!
//! Three formats: `text` (aligned key/value lines or columns, floats in
//! shortest round-trip decimal), `json` (pretty serde output, floats
//! round-trip exactly), and `csv` (one header row, floats at 12
//! significant digits, vector fields joined with `;`).

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Text-format float: shortest round-trip decimal, switching to exponent
/// notation below 1e-3 so small products stay readable.
pub fn text_f(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e16) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// CSV-format float: 12 significant digits in exponent notation.
pub fn csv_f(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn join(xs: &[f64], f: impl Fn(f64) -> String, sep: &str) -> String {
    xs.iter().map(|&x| f(x)).collect::<Vec<_>>().join(sep)
}

pub fn signs_text(eps: &[i8]) -> String {
    eps.iter()
        .map(|&e| if e > 0 { "+1" } else { "-1" })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn signs_csv(eps: &[i8]) -> String {
    eps.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn emit_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// One aligned `label  value` line.
pub fn kv(label: &str, value: impl AsRef<str>) {
    println!("{label:<18} {}", value.as_ref());
}
