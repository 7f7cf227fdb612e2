//! Converters from two public-data layouts into ingestible CSV files.
//!
//! Neither raw dataset ships with the repository (both sit behind
//! registration or bulk-download portals); the converters document the
//! expected column layouts and are exercised by synthetic fixtures shaped
//! like the real files.

use crate::error::{Error, Result};
use crate::space::wasserstein::midpoint_levels;
use std::io::Write;
use std::path::Path;

/// Convert a period life table in the standard mortality-database text
/// layout into one age-at-death quantile row per year.
///
/// Expected layout: any number of preamble lines, then a whitespace-
/// separated header containing the tokens `Year`, `Age`, and `dx`, then one
/// row per (year, age) with those columns. Ages are integers with a
/// terminal open interval written like `110+`; `dx` is the death count at
/// that age (missing values written as `.`).
///
/// Deaths within age x are spread uniformly over [x, x+1), and the quantile
/// function of the resulting histogram is evaluated at the m midpoint
/// levels. The output CSV has columns `year,v1..vm` and ingests with the
/// `quantiles` layout (id column `year`); a support of [0, 111] covers
/// every value the converter can produce for a 110+ table.
pub fn convert_hmd_lifetable(input: &Path, m: usize, output: &Path) -> Result<usize> {
    if m == 0 {
        return Err(Error::config("quantile grid size must be positive"));
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::ingestion(format!("{}: {e}", input.display())))?;
    let mut lines = text.lines();
    let header = loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::ingestion(format!("{}: no header line", input.display())))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.contains(&"Year") && tokens.contains(&"Age") && tokens.contains(&"dx") {
            break tokens.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        }
    };
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (year_col, age_col, dx_col) = (col("Year"), col("Age"), col("dx"));

    // (year, ages, masses) in file order.
    let mut tables: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let needed = year_col.max(age_col).max(dx_col);
        if tokens.len() <= needed {
            return Err(Error::ingestion(format!(
                "{}: line {} has too few columns",
                input.display(),
                lineno + 1
            )));
        }
        let year = tokens[year_col].to_string();
        let age_token = tokens[age_col].trim_end_matches('+');
        let age: f64 = age_token.parse().map_err(|_| {
            Error::ingestion(format!(
                "{}: unreadable age '{}'",
                input.display(),
                tokens[age_col]
            ))
        })?;
        let dx: f64 = match tokens[dx_col] {
            "." => 0.0,
            raw => raw.parse().map_err(|_| {
                Error::ingestion(format!("{}: unreadable dx '{raw}'", input.display()))
            })?,
        };
        if dx < 0.0 {
            return Err(Error::ingestion(format!(
                "{}: negative death count {dx}",
                input.display()
            )));
        }
        match tables.last_mut() {
            Some((y, ages, masses)) if *y == year => {
                ages.push(age);
                masses.push(dx);
            }
            _ => tables.push((year, vec![age], vec![dx])),
        }
    }
    if tables.is_empty() {
        return Err(Error::ingestion(format!(
            "{}: no data rows",
            input.display()
        )));
    }

    let file = std::fs::File::create(output)
        .map_err(|e| Error::ingestion(format!("{}: {e}", output.display())))?;
    let mut out = std::io::BufWriter::new(file);
    let header: Vec<String> = std::iter::once("year".to_string())
        .chain((1..=m).map(|k| format!("v{k}")))
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(Error::Io)?;
    for (year, ages, masses) in &tables {
        let quantiles = histogram_quantiles(ages, masses, m).map_err(|e| {
            Error::ingestion(format!("{}: year {year}: {e}", input.display()))
        })?;
        let mut fields = vec![year.clone()];
        fields.extend(quantiles.iter().map(|q| format!("{q}")));
        writeln!(out, "{}", fields.join(",")).map_err(Error::Io)?;
    }
    out.flush().map_err(Error::Io)?;
    Ok(tables.len())
}

/// Quantiles of a histogram with unit-width bins starting at `ages`,
/// evaluated at the midpoint levels.
fn histogram_quantiles(ages: &[f64], masses: &[f64], m: usize) -> Result<Vec<f64>> {
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(Error::ingestion("all death counts are zero"));
    }
    let mut cumulative = Vec::with_capacity(masses.len() + 1);
    cumulative.push(0.0);
    for mass in masses {
        cumulative.push(cumulative.last().unwrap() + mass);
    }
    let quantiles = midpoint_levels(m)
        .into_iter()
        .map(|u| {
            let target = u * total;
            let mut k = 0;
            while k + 1 < masses.len() && (cumulative[k + 1] < target || masses[k] == 0.0) {
                k += 1;
            }
            ages[k] + (target - cumulative[k]) / masses[k]
        })
        .collect();
    Ok(quantiles)
}

/// Convert a daily-summaries temperature CSV into a long-form samples file
/// of summer (June–September) maximum/minimum pairs.
///
/// Expected layout: a CSV with columns `STATION`, `DATE` (YYYY-MM-DD),
/// `TMAX`, and `TMIN` (degrees; other columns ignored). Rows with a missing
/// maximum or minimum are skipped. With `per_year`, observations are
/// station-year pairs; otherwise a whole station is one observation.
///
/// The output has columns `obs,tmax,tmin` and ingests with the `samples`
/// layout of a 2-D density grid space.
pub fn convert_noaa_daily(
    input: &Path,
    per_year: bool,
    output: &Path,
) -> Result<(usize, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(input)
        .map_err(|e| Error::ingestion(format!("{}: {e}", input.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::ingestion(format!("{}: {e}", input.display())))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::ingestion(format!("{}: column '{name}' not found", input.display()))
        })
    };
    let station_col = col("STATION")?;
    let date_col = col("DATE")?;
    let tmax_col = col("TMAX")?;
    let tmin_col = col("TMIN")?;

    let file = std::fs::File::create(output)
        .map_err(|e| Error::ingestion(format!("{}: {e}", output.display())))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "obs,tmax,tmin").map_err(Error::Io)?;

    let mut groups: Vec<String> = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record =
            record.map_err(|e| Error::ingestion(format!("{}: {e}", input.display())))?;
        let date = record.get(date_col).unwrap_or("");
        if date.len() < 7 {
            continue;
        }
        let month = &date[5..7];
        if !matches!(month, "06" | "07" | "08" | "09") {
            continue;
        }
        let tmax = record.get(tmax_col).unwrap_or("").trim();
        let tmin = record.get(tmin_col).unwrap_or("").trim();
        if tmax.is_empty() || tmin.is_empty() {
            continue;
        }
        let (tmax, tmin): (f64, f64) = match (tmax.parse(), tmin.parse()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let station = record.get(station_col).unwrap_or("").to_string();
        let obs = if per_year {
            format!("{station}_{}", &date[..4])
        } else {
            station
        };
        if groups.last() != Some(&obs) && !groups.contains(&obs) {
            groups.push(obs.clone());
        }
        writeln!(out, "{obs},{tmax},{tmin}").map_err(Error::Io)?;
        rows += 1;
    }
    out.flush().map_err(Error::Io)?;
    if rows == 0 {
        return Err(Error::ingestion(format!(
            "{}: no usable summer rows",
            input.display()
        )));
    }
    Ok((groups.len(), rows))
}
