//! Reading and writing spaces as JSON or CSV.
//!
//! JSON: `{"labels": ["a", ...], "dist": [[0.0, ...], ...]}` with a
//! row-major full matrix; `labels` may be omitted. CSV: a header row of
//! labels, then the matrix rows. Both run through full metric validation.

use crate::space::{FiniteMetricSpace, SpaceError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] SpaceError),
}

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    dist: Vec<Vec<f64>>,
}

pub fn space_to_json(x: &FiniteMetricSpace) -> String {
    let file = SpaceFile {
        labels: Some(x.labels().to_vec()),
        dist: (0..x.n())
            .map(|i| x.dist().row(i).to_vec())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("space serialization cannot fail")
}

pub fn space_from_json(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let file: SpaceFile = serde_json::from_str(text)?;
    Ok(FiniteMetricSpace::new(&file.dist, file.labels)?)
}

pub fn space_to_csv(x: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    out.push_str(&x.labels().join(","));
    out.push('\n');
    for i in 0..x.n() {
        let row: Vec<String> = x.dist().row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn space_from_csv(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(IoError::Csv {
        line: 1,
        message: "empty input".into(),
    })?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| IoError::Csv {
            line: idx + 1,
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(FiniteMetricSpace::new(&rows, Some(labels))?)
}

/// Reads a space from a file, picking the format by extension (`.csv` means
/// CSV, anything else JSON).
pub fn read_space_file(path: &Path) -> Result<FiniteMetricSpace, IoError> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        space_from_csv(&text)
    } else {
        space_from_json(&text)
    }
}

pub fn write_space_file(path: &Path, x: &FiniteMetricSpace) -> Result<(), IoError> {
    let text = if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        space_to_csv(x)
    } else {
        space_to_json(x)
    };
    std::fs::write(path, text)?;
    Ok(())
}
