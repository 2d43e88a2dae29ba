//! File formats: diagram, point-cloud, feature-matrix, score and coefficient
//! CSVs plus JSON sidecars. Every writer goes through [`atomic_write`].
//!
//! Floats are written with Rust's shortest round-trip formatting, so files
//! re-read to identical values and identical inputs give identical bytes.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::diagrams::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::featurize::{ColumnKey, DatasetFeaturizer, FeatureMatrix};
use crate::learn::CoefficientGrid;
use crate::persistence::PointCloud;

/// Writes `bytes` to a temporary sibling and renames it over `path`,
/// creating parent directories as needed.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse(path, e.to_string()))
}

/// Non-comment, non-blank rows split on commas, with 1-based line numbers.
fn data_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((k + 1, line.split(',').map(str::trim).collect()))
        }
    })
}

fn is_header(fields: &[&str]) -> bool {
    fields.iter().any(|f| f.parse::<f64>().is_err())
}

/// Homology dimension encoded as a `_h0` / `_h1` file-stem suffix.
pub fn dimension_from_path(path: &Path) -> Option<usize> {
    let stem = path.file_stem()?.to_str()?;
    let (_, suffix) = stem.rsplit_once("_h")?;
    suffix.parse().ok()
}

/// `{prefix}_h{dim}.csv`.
pub fn diagram_path(prefix: &Path, dim: usize) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!("_h{dim}.csv"));
    prefix.with_file_name(name)
}

/// Parses `birth,death[,multiplicity]` rows; an optional header row and
/// `#` comments are skipped.
pub fn parse_diagram(text: &str, dimension: usize) -> std::result::Result<PersistenceDiagram, String> {
    let mut points = Vec::new();
    for (idx, (line, fields)) in data_rows(text).enumerate() {
        if idx == 0 && is_header(&fields) {
            continue;
        }
        if !(2..=3).contains(&fields.len()) {
            return Err(format!("line {line}: expected 2 or 3 columns, found {}", fields.len()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("line {line}: `{s}` is not a number"));
        let birth = num(fields[0])?;
        let death = num(fields[1])?;
        let mult = match fields.get(2) {
            Some(m) => m.parse::<u32>().map_err(|_| format!("line {line}: bad multiplicity `{m}`"))?,
            None => 1,
        };
        points.push(DiagramPoint::new(birth, death, mult).map_err(|e| format!("line {line}: {e}"))?);
    }
    Ok(PersistenceDiagram::new(points, dimension))
}

/// Reads a diagram; the dimension comes from the file name, defaulting to 0.
pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    let dim = dimension_from_path(path).unwrap_or(0);
    parse_diagram(&read_text(path)?, dim).map_err(|m| Error::parse(path, m))
}

pub fn format_diagram(diagram: &PersistenceDiagram) -> String {
    let mut out = String::from("birth,death,multiplicity\n");
    for p in diagram.points() {
        out.push_str(&format!("{},{},{}\n", p.birth(), p.death(), p.multiplicity()));
    }
    out
}

pub fn write_diagram(path: &Path, diagram: &PersistenceDiagram) -> Result<()> {
    atomic_write(path, format_diagram(diagram).as_bytes())
}

/// One point per row; a non-numeric first row is treated as a header.
pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    for (idx, (line, fields)) in data_rows(&text).enumerate() {
        if idx == 0 && is_header(&fields) {
            continue;
        }
        let row = fields
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::parse(path, format!("line {line}: `{f}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    PointCloud::new(rows).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn write_point_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut out = String::new();
    for p in cloud.iter() {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// `features.csv` -> `features.featurizer.json`.
pub fn featurizer_sidecar(path: &Path) -> PathBuf {
    path.with_extension("featurizer.json")
}

fn csv_bytes<F>(fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(|e| Error::Config(format!("CSV encoding failed: {e}")))?;
    w.into_inner().map_err(|e| Error::Config(format!("CSV encoding failed: {e}")))
}

/// Writes the matrix with a `h{dim}_i{i}_j{j}` header and, when given, the
/// featurizer that produced it as a JSON sidecar.
pub fn write_feature_matrix(path: &Path, matrix: &FeatureMatrix, featurizer: Option<&DatasetFeaturizer>) -> Result<()> {
    let bytes = csv_bytes(|w| {
        w.write_record(matrix.column_index().iter().map(ColumnKey::name))?;
        for row in matrix.values().row_iter() {
            w.write_record(row.iter().map(f64::to_string))?;
        }
        Ok(())
    })?;
    atomic_write(path, &bytes)?;
    if let Some(f) = featurizer {
        write_json(&featurizer_sidecar(path), f)?;
    }
    Ok(())
}

pub fn read_feature_matrix(path: &Path) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let header = reader.headers().map_err(|e| Error::parse(path, e.to_string()))?.clone();
    let keys = header
        .iter()
        .map(|h| ColumnKey::parse(h).ok_or_else(|| Error::parse(path, format!("bad column name `{h}`"))))
        .collect::<Result<Vec<_>>>()?;
    let mut data = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
        for field in record.iter() {
            let v = field.trim().parse::<f64>().map_err(|_| Error::parse(path, format!("`{field}` is not a number")))?;
            data.push(v);
        }
        rows += 1;
    }
    let values = DMatrix::from_row_slice(rows, keys.len(), &data);
    FeatureMatrix::new(values, keys).map_err(|e| Error::parse(path, e.to_string()))
}

/// One row of a score report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub experiment: String,
    /// Run index, or `mean` / `std` for summary rows.
    pub run: String,
    pub split: String,
    pub metric: String,
    pub value: f64,
}

pub fn format_scores(rows: &[ScoreRow]) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        for r in rows {
            w.serialize(r)?;
        }
        Ok(())
    })
}

pub fn write_scores(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    atomic_write(path, &format_scores(rows)?)
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::parse(path, e.to_string())))
        .collect()
}

/// Long-format heatmap data: `i,j,value`.
pub fn format_grid(grid: &CoefficientGrid) -> String {
    let mut out = String::from("i,j,value\n");
    for (i, row) in grid.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out.push_str(&format!("{i},{j},{v}\n"));
        }
    }
    out
}

/// Class labels (`label` column) or regression targets (`target` column).
pub fn read_labels(path: &Path) -> Result<crate::learn::Labels> {
    use crate::learn::Labels;
    let text = read_text(path)?;
    let mut rows = data_rows(&text);
    let Some((_, header)) = rows.next() else {
        return Err(Error::parse(path, "empty label file"));
    };
    let column = |name: &str| header.iter().position(|h| *h == name);
    let values: Vec<(usize, Vec<&str>)> = rows.collect();
    let pick = |c: usize| -> Result<Vec<&str>> {
        values
            .iter()
            .map(|(line, f)| f.get(c).copied().ok_or_else(|| Error::parse(path, format!("line {line}: missing column"))))
            .collect()
    };
    if let Some(c) = column("label") {
        let parsed = pick(c)?
            .into_iter()
            .map(|s| s.parse::<usize>().map_err(|_| Error::parse(path, format!("bad class label `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Labels::Classes(parsed))
    } else if let Some(c) = column("target") {
        let parsed = pick(c)?
            .into_iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::parse(path, format!("bad target `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Labels::Regression(parsed))
    } else {
        Err(Error::parse(path, "expected a `label` or `target` column"))
    }
}

pub fn write_labels(path: &Path, labels: &crate::learn::Labels) -> Result<()> {
    use crate::learn::Labels;
    let text = match labels {
        Labels::Classes(c) => std::iter::once("label".to_string()).chain(c.iter().map(usize::to_string)).collect::<Vec<_>>(),
        Labels::Regression(t) => std::iter::once("target".to_string()).chain(t.iter().map(f64::to_string)).collect(),
    };
    atomic_write(path, (text.join("\n") + "\n").as_bytes())
}
