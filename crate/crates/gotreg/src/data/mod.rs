//! Dataset description and ingestion: a JSON manifest names the space, the
//! response and predictor files, and the CSV layout of each file; loading
//! aligns observations by id and validates every point on the way in.
//! Emission writes points back out in the same layouts at full precision,
//! so an emitted file re-ingests to the same payloads.

pub mod convert;

use crate::error::{Error, Result};
use crate::space::{spd, wasserstein, SpaceDescriptor, SpaceKind, SpacePoint};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
#[cfg(test)]
use std::path::PathBuf;
use std::sync::Arc;

fn default_grid_side() -> usize {
    32
}

/// Space declaration in a manifest. Mirrors the library's space kinds, with
/// one extra form: `sphere_grid` describes densities on a 2-D tensor grid
/// and derives the quadrature weights (cell areas) and the orthant
/// constraint automatically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifestSpace {
    Euclidean {
        dim: usize,
    },
    Wasserstein {
        grid_size: usize,
        support: (f64, f64),
    },
    Sphere {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default)]
        constrained: bool,
    },
    SphereGrid {
        x_range: (f64, f64),
        y_range: (f64, f64),
        #[serde(default = "default_grid_side")]
        nx: usize,
        #[serde(default = "default_grid_side")]
        ny: usize,
    },
    Spd {
        size: usize,
    },
}

impl ManifestSpace {
    pub fn to_descriptor(&self) -> Result<Arc<SpaceDescriptor>> {
        match self {
            ManifestSpace::Euclidean { dim } => SpaceDescriptor::euclidean(*dim),
            ManifestSpace::Wasserstein { grid_size, support } => {
                SpaceDescriptor::wasserstein(*grid_size, *support)
            }
            ManifestSpace::Sphere { dim, weights, constrained } => match weights {
                Some(w) => SpaceDescriptor::sphere_weighted(*dim, w.clone(), *constrained),
                None if *constrained => {
                    SpaceDescriptor::sphere_weighted(*dim, vec![1.0; *dim], true)
                }
                None => SpaceDescriptor::sphere(*dim),
            },
            ManifestSpace::SphereGrid { x_range, y_range, nx, ny } => {
                if *nx == 0 || *ny == 0 {
                    return Err(Error::config("sphere grid sides must be positive"));
                }
                if x_range.1 <= x_range.0 || y_range.1 <= y_range.0 {
                    return Err(Error::config("sphere grid ranges must be increasing"));
                }
                let cell = self.cell_area().unwrap();
                SpaceDescriptor::sphere_weighted(nx * ny, vec![cell; nx * ny], true)
            }
            ManifestSpace::Spd { size } => SpaceDescriptor::spd(*size),
        }
    }

    fn cell_area(&self) -> Option<f64> {
        match self {
            ManifestSpace::SphereGrid { x_range, y_range, nx, ny } => Some(
                (x_range.1 - x_range.0) / *nx as f64 * ((y_range.1 - y_range.0) / *ny as f64),
            ),
            _ => None,
        }
    }
}

/// CSV layout of one data file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    /// Long form, one raw sample per row: (id, value) for distributions,
    /// (id, x, y) for 2-D density grids. Grouped by id in first-appearance
    /// order, then embedded.
    Samples,
    /// One observation per row: the quantile vector (grid_size columns).
    Quantiles,
    /// One observation per row: plain coordinates (Euclidean or unit
    /// vectors on the sphere).
    Vectors,
    /// One observation per row: dense symmetric matrix, row-major
    /// (size² columns).
    Matrices,
    /// One observation per row: lower-triangular Cholesky factor,
    /// row-major (size·(size+1)/2 columns).
    Factors,
    /// One observation per row: density values on the declared grid.
    Densities,
}

impl FileFormat {
    fn name(self) -> &'static str {
        match self {
            FileFormat::Samples => "samples",
            FileFormat::Quantiles => "quantiles",
            FileFormat::Vectors => "vectors",
            FileFormat::Matrices => "matrices",
            FileFormat::Factors => "factors",
            FileFormat::Densities => "densities",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FileSpec {
    pub path: String,
    pub format: FileFormat,
}

/// Declarative dataset description: the space, where each variable lives,
/// and how its file is laid out. Paths are resolved relative to the
/// manifest file's directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub space: ManifestSpace,
    /// Optional so prediction-input manifests can omit it; fitting and
    /// evaluation require it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<FileSpec>,
    pub predictors: Vec<FileSpec>,
    /// Name of the observation-id column. When absent, wide layouts align
    /// rows by position and the samples layout treats the first column as
    /// the id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_column: Option<String>,
}

impl DatasetManifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::ingestion(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        let manifest: DatasetManifest = serde_json::from_str(&text)
            .map_err(|e| Error::ingestion(format!("manifest {}: {e}", path.display())))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if self.predictors.is_empty() {
            return Err(Error::ingestion("manifest declares no predictors"));
        }
        for spec in self.response.iter().chain(self.predictors.iter()) {
            let compatible: &[FileFormat] = match &self.space {
                ManifestSpace::Euclidean { .. } => &[FileFormat::Vectors],
                ManifestSpace::Wasserstein { .. } => {
                    &[FileFormat::Samples, FileFormat::Quantiles]
                }
                ManifestSpace::Sphere { .. } => &[FileFormat::Vectors],
                ManifestSpace::SphereGrid { .. } => {
                    &[FileFormat::Samples, FileFormat::Densities]
                }
                ManifestSpace::Spd { .. } => &[FileFormat::Matrices, FileFormat::Factors],
            };
            if !compatible.contains(&spec.format) {
                return Err(Error::ingestion(format!(
                    "format '{}' of {} does not fit the declared space",
                    spec.format.name(),
                    spec.path
                )));
            }
        }
        Ok(())
    }
}

/// Loaded dataset: aligned predictor rows and responses, with the ids in
/// response-file order (or row numbers when no id column is declared).
#[derive(Clone, Debug)]
pub struct Dataset {
    pub space: Arc<SpaceDescriptor>,
    pub ids: Vec<String>,
    pub x: Vec<Vec<SpacePoint>>,
    pub y: Vec<SpacePoint>,
}

struct Column {
    ids: Vec<String>,
    points: Vec<SpacePoint>,
}

fn ingest_err(path: &Path, detail: impl std::fmt::Display) -> Error {
    Error::ingestion(format!("{}: {detail}", path.display()))
}

fn parse_value(raw: &str, path: &Path, row: usize) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| ingest_err(path, format!("row {row}: '{raw}' is not a number")))
}

/// Read a CSV into (ids, numeric rows). The id column, when declared, may
/// sit at any position; remaining columns are values in header order. For
/// the samples layout without a declared id column, the first column is
/// the id.
fn read_numeric_csv(
    path: &Path,
    id_column: Option<&str>,
    first_col_is_id: bool,
) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ingest_err(path, e))?;
    let headers = reader.headers().map_err(|e| ingest_err(path, e))?.clone();
    let id_index = match id_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            ingest_err(path, format!("id column '{name}' not found in header"))
        })?),
        None if first_col_is_id => Some(0),
        None => None,
    };
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ingest_err(path, e))?;
        let row_no = i + 2; // 1-based, after the header
        let mut values = Vec::with_capacity(record.len());
        let mut id = String::new();
        for (c, field) in record.iter().enumerate() {
            if Some(c) == id_index {
                id = field.to_string();
            } else {
                values.push(parse_value(field, path, row_no)?);
            }
        }
        if id_index.is_some() && id.is_empty() {
            return Err(ingest_err(path, format!("row {row_no}: empty id")));
        }
        ids.push(if id_index.is_some() { id } else { i.to_string() });
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(ingest_err(path, "no data rows"));
    }
    Ok((ids, rows))
}

fn group_by_id(ids: Vec<String>, rows: Vec<Vec<f64>>) -> (Vec<String>, Vec<Vec<Vec<f64>>>) {
    let mut order: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut groups: Vec<Vec<Vec<f64>>> = Vec::new();
    for (id, row) in ids.into_iter().zip(rows) {
        let slot = *index.entry(id.clone()).or_insert_with(|| {
            order.push(id);
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(row);
    }
    (order, groups)
}

fn expect_width(path: &Path, rows: &[Vec<f64>], width: usize, what: &str) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(ingest_err(
                path,
                format!(
                    "row {}: expected {width} {what} columns, found {}",
                    i + 2,
                    row.len()
                ),
            ));
        }
    }
    Ok(())
}

fn load_column(
    spec: &FileSpec,
    manifest: &DatasetManifest,
    space: &Arc<SpaceDescriptor>,
    base: &Path,
) -> Result<Column> {
    let path = base.join(&spec.path);
    let id_column = manifest.id_column.as_deref();
    let make_point = |payload: Vec<f64>, row: usize| -> Result<SpacePoint> {
        SpacePoint::new(space.clone(), payload)
            .map_err(|e| ingest_err(&path, format!("row {row}: {e}")))
    };

    match spec.format {
        FileFormat::Samples => {
            let (ids, rows) = read_numeric_csv(&path, id_column, true)?;
            let (ids, groups) = group_by_id(ids, rows);
            let mut points = Vec::with_capacity(groups.len());
            match (&manifest.space, &space.kind) {
                (ManifestSpace::Wasserstein { .. }, SpaceKind::Wasserstein { grid_size, support }) => {
                    for (id, group) in ids.iter().zip(&groups) {
                        expect_width(&path, group, 1, "sample value")?;
                        let samples: Vec<f64> = group.iter().map(|r| r[0]).collect();
                        let payload = wasserstein::from_samples(&samples, *grid_size, *support)
                            .map_err(|e| ingest_err(&path, format!("observation '{id}': {e}")))?;
                        points.push(SpacePoint::new(space.clone(), payload)?);
                    }
                }
                (ManifestSpace::SphereGrid { x_range, y_range, nx, ny }, _) => {
                    for (id, group) in ids.iter().zip(&groups) {
                        expect_width(&path, group, 2, "coordinate")?;
                        let density =
                            bin_pairs(group, *x_range, *y_range, *nx, *ny).map_err(|e| {
                                ingest_err(&path, format!("observation '{id}': {e}"))
                            })?;
                        let payload = crate::space::sphere::embed_density(
                            &density,
                            space.quad(),
                        )
                        .map_err(|e| ingest_err(&path, format!("observation '{id}': {e}")))?;
                        points.push(SpacePoint::new(space.clone(), payload)?);
                    }
                }
                _ => {
                    return Err(ingest_err(
                        &path,
                        "samples layout needs a distribution-valued space",
                    ))
                }
            }
            Ok(Column { ids, points })
        }
        FileFormat::Quantiles => {
            let (ids, rows) = read_numeric_csv(&path, id_column, false)?;
            let m = match &space.kind {
                SpaceKind::Wasserstein { grid_size, .. } => *grid_size,
                _ => return Err(ingest_err(&path, "quantile rows need a distribution space")),
            };
            expect_width(&path, &rows, m, "quantile")?;
            let points = rows
                .into_iter()
                .enumerate()
                .map(|(i, payload)| make_point(payload, i + 2))
                .collect::<Result<_>>()?;
            Ok(Column { ids, points })
        }
        FileFormat::Vectors => {
            let (ids, rows) = read_numeric_csv(&path, id_column, false)?;
            let dim = match &space.kind {
                SpaceKind::Euclidean { dim } => *dim,
                SpaceKind::Sphere { dim, .. } => *dim,
                _ => return Err(ingest_err(&path, "vector rows need a vector-like space")),
            };
            expect_width(&path, &rows, dim, "coordinate")?;
            let points = rows
                .into_iter()
                .enumerate()
                .map(|(i, payload)| make_point(payload, i + 2))
                .collect::<Result<_>>()?;
            Ok(Column { ids, points })
        }
        FileFormat::Matrices => {
            let (ids, rows) = read_numeric_csv(&path, id_column, false)?;
            let m = match &space.kind {
                SpaceKind::Spd { size } => *size,
                _ => return Err(ingest_err(&path, "matrix rows need the SPD space")),
            };
            expect_width(&path, &rows, m * m, "matrix entry")?;
            let mut points = Vec::with_capacity(rows.len());
            for (i, dense) in rows.iter().enumerate() {
                let row_no = i + 2;
                for r in 0..m {
                    for c in 0..r {
                        if (dense[r * m + c] - dense[c * m + r]).abs() > 1e-12 {
                            return Err(ingest_err(
                                &path,
                                format!("row {row_no}: matrix is not symmetric"),
                            ));
                        }
                    }
                }
                let payload = spd::cholesky_factor(dense, m)
                    .map_err(|e| ingest_err(&path, format!("row {row_no}: {e}")))?;
                points.push(make_point(payload, row_no)?);
            }
            Ok(Column { ids, points })
        }
        FileFormat::Factors => {
            let (ids, rows) = read_numeric_csv(&path, id_column, false)?;
            let m = match &space.kind {
                SpaceKind::Spd { size } => *size,
                _ => return Err(ingest_err(&path, "factor rows need the SPD space")),
            };
            expect_width(&path, &rows, spd::payload_len(m), "factor entry")?;
            let points = rows
                .into_iter()
                .enumerate()
                .map(|(i, payload)| make_point(payload, i + 2))
                .collect::<Result<_>>()?;
            Ok(Column { ids, points })
        }
        FileFormat::Densities => {
            let (ids, rows) = read_numeric_csv(&path, id_column, false)?;
            let dim = match &space.kind {
                SpaceKind::Sphere { dim, .. } => *dim,
                _ => return Err(ingest_err(&path, "density rows need a sphere space")),
            };
            expect_width(&path, &rows, dim, "density")?;
            let mut points = Vec::with_capacity(rows.len());
            for (i, density) in rows.into_iter().enumerate() {
                let payload = crate::space::sphere::embed_density(&density, space.quad())
                    .map_err(|e| ingest_err(&path, format!("row {}: {e}", i + 2)))?;
                points.push(make_point(payload, i + 2)?);
            }
            Ok(Column { ids, points })
        }
    }
}

/// Histogram of 2-D sample pairs on the tensor grid, normalized so the
/// density integrates to exactly 1 under the cell-area weights.
fn bin_pairs(
    pairs: &[Vec<f64>],
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>> {
    let mut counts = vec![0.0_f64; nx * ny];
    let dx = (x_range.1 - x_range.0) / nx as f64;
    let dy = (y_range.1 - y_range.0) / ny as f64;
    for pair in pairs {
        let (x, y) = (pair[0], pair[1]);
        if x < x_range.0 || x > x_range.1 || y < y_range.0 || y > y_range.1 {
            return Err(Error::ingestion(format!(
                "sample ({x}, {y}) outside the declared grid ranges"
            )));
        }
        let ix = (((x - x_range.0) / dx) as usize).min(nx - 1);
        let iy = (((y - y_range.0) / dy) as usize).min(ny - 1);
        counts[ix * ny + iy] += 1.0;
    }
    let total: f64 = pairs.len() as f64;
    let cell = dx * dy;
    Ok(counts.into_iter().map(|c| c / (total * cell)).collect())
}

/// Align a predictor column to the response ids. With a declared id column
/// every response id must appear exactly once; without one, counts must
/// match and rows pair positionally.
fn align(column: Column, ids: &[String], with_ids: bool, what: &str) -> Result<Vec<SpacePoint>> {
    if !with_ids {
        if column.points.len() != ids.len() {
            return Err(Error::ingestion(format!(
                "{what}: {} rows but the response has {}",
                column.points.len(),
                ids.len()
            )));
        }
        return Ok(column.points);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, id) in column.ids.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(Error::ingestion(format!("{what}: duplicate id '{id}'")));
        }
    }
    ids.iter()
        .map(|id| {
            index
                .get(id.as_str())
                .map(|&i| column.points[i].clone())
                .ok_or_else(|| Error::ingestion(format!("{what}: id '{id}' missing")))
        })
        .collect()
}

/// Load predictors and response per the manifest, aligned by id.
pub fn load_dataset(manifest: &DatasetManifest, base: &Path) -> Result<Dataset> {
    manifest.validate()?;
    let space = manifest.space.to_descriptor()?;
    let response_spec = manifest
        .response
        .as_ref()
        .ok_or_else(|| Error::ingestion("manifest has no response file"))?;
    let response = load_column(response_spec, manifest, &space, base)?;
    let carries_ids = |spec: &FileSpec| {
        manifest.id_column.is_some() || matches!(spec.format, FileFormat::Samples)
    };
    let n = response.points.len();
    let mut columns: Vec<Vec<SpacePoint>> = Vec::with_capacity(manifest.predictors.len());
    for spec in &manifest.predictors {
        let column = load_column(spec, manifest, &space, base)?;
        let by_id = carries_ids(response_spec) && carries_ids(spec);
        columns.push(align(column, &response.ids, by_id, &spec.path)?);
    }
    let x: Vec<Vec<SpacePoint>> = (0..n)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    Ok(Dataset { space, ids: response.ids, x, y: response.points })
}

/// Load only the predictor columns (for prediction inputs); ids come from
/// the first predictor file.
pub fn load_predictors(manifest: &DatasetManifest, base: &Path) -> Result<(Vec<String>, Vec<Vec<SpacePoint>>)> {
    manifest.validate()?;
    let space = manifest.space.to_descriptor()?;
    let first = load_column(&manifest.predictors[0], manifest, &space, base)?;
    let carries_ids = |spec: &FileSpec| {
        manifest.id_column.is_some() || matches!(spec.format, FileFormat::Samples)
    };
    let ids = first.ids.clone();
    let n = first.points.len();
    let mut columns = vec![first.points];
    for spec in &manifest.predictors[1..] {
        let column = load_column(spec, manifest, &space, base)?;
        let by_id = carries_ids(&manifest.predictors[0]) && carries_ids(spec);
        columns.push(align(column, &ids, by_id, &spec.path)?);
    }
    let rows = (0..n)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    Ok((ids, rows))
}

/// Write points in a wide layout. Values print in shortest round-trip
/// form, so re-ingesting reproduces the payloads exactly.
pub fn emit_points(
    points: &[SpacePoint],
    ids: Option<&[String]>,
    format: FileFormat,
    id_column: &str,
    path: &Path,
) -> Result<()> {
    if points.is_empty() {
        return Err(Error::config("nothing to emit"));
    }
    let space = &points[0].space;
    let row_values = |point: &SpacePoint| -> Result<Vec<f64>> {
        match (format, &space.kind) {
            (FileFormat::Quantiles, SpaceKind::Wasserstein { .. })
            | (FileFormat::Vectors, SpaceKind::Euclidean { .. })
            | (FileFormat::Vectors, SpaceKind::Sphere { .. })
            | (FileFormat::Factors, SpaceKind::Spd { .. }) => Ok(point.payload.clone()),
            (FileFormat::Matrices, SpaceKind::Spd { size }) => {
                Ok(spd::to_matrix(&point.payload, *size))
            }
            (FileFormat::Densities, SpaceKind::Sphere { .. }) => {
                Ok(point.payload.iter().map(|g| g * g).collect())
            }
            _ => Err(Error::config(format!(
                "cannot emit this space in the '{}' layout",
                format.name()
            ))),
        }
    };
    let width = row_values(&points[0])?.len();
    let file = std::fs::File::create(path).map_err(|e| ingest_err(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut header: Vec<String> = Vec::new();
    if ids.is_some() {
        header.push(id_column.to_string());
    }
    header.extend((1..=width).map(|k| format!("v{k}")));
    writeln!(out, "{}", header.join(",")).map_err(Error::Io)?;
    for (i, point) in points.iter().enumerate() {
        let values = row_values(point)?;
        let mut fields: Vec<String> = Vec::with_capacity(width + 1);
        if let Some(ids) = ids {
            fields.push(ids[i].clone());
        }
        fields.extend(values.iter().map(|v| format!("{v}")));
        writeln!(out, "{}", fields.join(",")).map_err(Error::Io)?;
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

/// Plot-ready emission: long-form CSV rows describing each point in
/// coordinates a plotting tool can consume directly.
pub fn emit_plot_data(points: &[SpacePoint], ids: &[String], path: &Path) -> Result<()> {
    if points.is_empty() {
        return Err(Error::config("nothing to emit"));
    }
    let space = &points[0].space;
    let file = std::fs::File::create(path).map_err(|e| ingest_err(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    match &space.kind {
        SpaceKind::Wasserstein { support, .. } => {
            writeln!(out, "id,bin_left,bin_right,density").map_err(Error::Io)?;
            for (id, point) in ids.iter().zip(points) {
                for (left, right, density) in
                    wasserstein::density_bins(&point.payload, *support)
                {
                    writeln!(out, "{id},{left},{right},{density}").map_err(Error::Io)?;
                }
            }
        }
        SpaceKind::Sphere { .. } => {
            writeln!(out, "id,cell,density").map_err(Error::Io)?;
            for (id, point) in ids.iter().zip(points) {
                for (cell, g) in point.payload.iter().enumerate() {
                    writeln!(out, "{id},{cell},{}", g * g).map_err(Error::Io)?;
                }
            }
        }
        SpaceKind::Spd { size } => {
            writeln!(out, "id,row,col,value").map_err(Error::Io)?;
            for (id, point) in ids.iter().zip(points) {
                let dense = spd::to_matrix(&point.payload, *size);
                for r in 0..*size {
                    for c in 0..*size {
                        writeln!(out, "{id},{r},{c},{}", dense[r * size + c])
                            .map_err(Error::Io)?;
                    }
                }
            }
        }
        SpaceKind::Euclidean { .. } => {
            writeln!(out, "id,coordinate,value").map_err(Error::Io)?;
            for (id, point) in ids.iter().zip(points) {
                for (k, v) in point.payload.iter().enumerate() {
                    writeln!(out, "{id},{k},{v}").map_err(Error::Io)?;
                }
            }
        }
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

/// The native wide layout for a space, used when emitting predictions.
pub fn native_format(space: &SpaceDescriptor) -> FileFormat {
    match &space.kind {
        SpaceKind::Euclidean { .. } => FileFormat::Vectors,
        SpaceKind::Wasserstein { .. } => FileFormat::Quantiles,
        SpaceKind::Sphere { .. } => FileFormat::Densities,
        SpaceKind::Spd { .. } => FileFormat::Factors,
    }
}
