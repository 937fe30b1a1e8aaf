//! Vector-set file loading.
//!
//! The primary format is JSON: `{"vectors": [[...], ...]}` with one unit
//! row per vector. Files with a `.csv` extension are instead parsed as
//! bare comma-separated rows, one vector per line; blank lines and lines
//! starting with `#` are skipped.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;

use polarize::vectors::UnitVectorSet;

#[derive(Deserialize)]
struct VectorsFile {
    vectors: Vec<Vec<f64>>,
}

pub fn load_vectors(path: &Path) -> Result<UnitVectorSet> {
    let raw =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let rows = if is_csv {
        parse_csv(&raw).with_context(|| format!("parsing {} as CSV", path.display()))?
    } else {
        serde_json::from_str::<VectorsFile>(&raw)
            .with_context(|| {
                format!(
                    "parsing {} as JSON; expected {{\"vectors\": [[...], ...]}}",
                    path.display()
                )
            })?
            .vectors
    };
    let set = UnitVectorSet::load(rows)
        .with_context(|| format!("{}: invalid vector set", path.display()))?;
    Ok(set)
}

fn parse_csv(raw: &str) -> Result<Vec<Vec<f64>>> {
    raw.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| {
            line.split(',')
                .map(|field| {
                    let field = field.trim();
                    field
                        .parse::<f64>()
                        .map_err(|e| anyhow!("bad number {field:?}: {e}"))
                })
                .collect()
        })
        .collect()
}
