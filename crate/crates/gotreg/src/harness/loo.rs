//! Leave-one-out evaluation: refit on each deleted-point training set,
//! predict the held-out response, and report the mean prediction distance.

use crate::error::{Error, Result};
use crate::nadaraya::{nw_predict, NwConfig};
use crate::regression::{fit, predict, FitConfig};
use crate::space::{self, SpacePoint};
use rayon::prelude::*;
use serde::Serialize;

/// Which predictor to run in each fold.
#[derive(Clone, Debug)]
pub enum LooMethod {
    Got(FitConfig),
    Nw(NwConfig),
}

impl LooMethod {
    fn name(&self) -> &'static str {
        match self {
            LooMethod::Got(_) => "got",
            LooMethod::Nw(_) => "nw",
        }
    }
}

/// Outcome of one fold: the prediction distance, or why the fold failed.
#[derive(Clone, Debug, Serialize)]
pub struct FoldRecord {
    pub index: usize,
    pub error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LooReport {
    pub method_name: String,
    pub per_fold: Vec<FoldRecord>,
    /// Mean prediction distance over the folds that succeeded.
    pub mean_error: f64,
    pub failed_folds: usize,
    pub warnings: Vec<String>,
}

fn run_fold(
    x: &[Vec<SpacePoint>],
    y: &[SpacePoint],
    held_out: usize,
    method: &LooMethod,
) -> Result<f64> {
    let train_x: Vec<Vec<SpacePoint>> = x
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != held_out)
        .map(|(_, row)| row.clone())
        .collect();
    let train_y: Vec<SpacePoint> = y
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != held_out)
        .map(|(_, yi)| yi.clone())
        .collect();
    let prediction = match method {
        LooMethod::Got(config) => {
            let model = fit(&train_x, &train_y, config)?;
            predict(&model, &x[held_out])?
        }
        LooMethod::Nw(config) => {
            // The kernel baseline is one-dimensional in the predictor: use
            // the first predictor column.
            let col: Vec<SpacePoint> = train_x.iter().map(|row| row[0].clone()).collect();
            nw_predict(&col, &train_y, &x[held_out][0], config)?
        }
    };
    space::distance(&prediction, &y[held_out])
}

/// Leave-one-out evaluation of one method over the dataset. Folds run in
/// parallel and are collected by index, so the report does not depend on
/// the thread schedule. Folds that fail are excluded from the mean and
/// flagged in their record.
pub fn loo_evaluate(
    x: &[Vec<SpacePoint>],
    y: &[SpacePoint],
    method: &LooMethod,
) -> Result<LooReport> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::config(format!(
            "predictor rows ({n}) and responses ({}) differ",
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::config(format!(
            "leave-one-out needs at least 3 observations, got {n}"
        )));
    }
    let p = x[0].len();
    if p == 0 {
        return Err(Error::config("no predictors".to_string()));
    }
    let mut warnings = Vec::new();
    if matches!(method, LooMethod::Nw(_)) && p > 1 {
        warnings.push(format!(
            "kernel baseline uses only the first of {p} predictors"
        ));
    }

    let per_fold: Vec<FoldRecord> = (0..n)
        .into_par_iter()
        .map(|i| match run_fold(x, y, i, method) {
            Ok(error) => FoldRecord { index: i, error: Some(error), failure: None },
            Err(e) => FoldRecord { index: i, error: None, failure: Some(e.to_string()) },
        })
        .collect();

    let successes: Vec<f64> = per_fold.iter().filter_map(|r| r.error).collect();
    let failed_folds = n - successes.len();
    if successes.is_empty() {
        return Err(Error::numeric("every leave-one-out fold failed".to_string()));
    }
    let mean_error = successes.iter().sum::<f64>() / successes.len() as f64;
    Ok(LooReport {
        method_name: method.name().to_string(),
        per_fold,
        mean_error,
        failed_folds,
        warnings,
    })
}
