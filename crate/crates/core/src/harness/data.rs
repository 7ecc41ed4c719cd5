use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ItemTable;

/// Cell contents treated as missing.
const MISSING: &[&str] = &["", "na", "nan", "null", "?", "."];

#[derive(Clone, Debug)]
pub struct LoadedTable {
    pub table: ItemTable,
    /// Rows removed because a cue or the criterion was missing or unparsable.
    pub dropped_rows: usize,
}

fn parse_cell(raw: &str) -> Option<f64> {
    let s = raw.trim();
    if MISSING.contains(&s.to_ascii_lowercase().as_str()) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn is_missing(raw: &str) -> bool {
    MISSING.contains(&raw.trim().to_ascii_lowercase().as_str())
}

/// Read a header-row CSV. Every column other than `criterion` and
/// `exclude` becomes a cue. A column none of whose present cells parse as
/// numbers is rejected; otherwise rows with a missing or unparsable value
/// are dropped.
pub fn load_item_table(path: &Path, criterion: &str, exclude: &[String]) -> Result<LoadedTable> {
    let file = std::fs::File::open(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    for name in std::iter::once(criterion).chain(exclude.iter().map(String::as_str)) {
        if !headers.iter().any(|h| h == name) {
            return Err(Error::MissingColumn(name.to_string()));
        }
    }
    let crit_col = headers.iter().position(|h| h == criterion).expect("checked above");
    let cue_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != crit_col && !exclude.contains(&headers[c]))
        .collect();
    if cue_cols.is_empty() {
        return Err(Error::invalid("no cue columns left besides the criterion"));
    }

    let records: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;
    let used: Vec<usize> = std::iter::once(crit_col).chain(cue_cols.iter().copied()).collect();
    for &c in &used {
        let mut present = 0;
        let mut numeric = 0;
        for r in &records {
            let cell = r.get(c).unwrap_or("");
            if !is_missing(cell) {
                present += 1;
                numeric += usize::from(parse_cell(cell).is_some());
            }
        }
        if present > 0 && numeric == 0 {
            return Err(Error::NonNumericColumn(headers[c].clone()));
        }
    }

    let mut items = Vec::new();
    let mut crit = Vec::new();
    let mut dropped = 0;
    for r in &records {
        let y = parse_cell(r.get(crit_col).unwrap_or(""));
        let x: Option<Vec<f64>> = cue_cols.iter().map(|&c| parse_cell(r.get(c).unwrap_or(""))).collect();
        match (y, x) {
            (Some(y), Some(x)) => {
                crit.push(y);
                items.push(x);
            }
            _ => dropped += 1,
        }
    }
    if dropped > 0 {
        log::info!("{}: dropped {dropped} rows with missing values", path.display());
    }
    if items.len() < 2 {
        return Err(Error::TooFewRows(items.len()));
    }
    let names = cue_cols.iter().map(|&c| headers[c].clone()).collect();
    Ok(LoadedTable { table: ItemTable::new(items, crit, names)?, dropped_rows: dropped })
}
