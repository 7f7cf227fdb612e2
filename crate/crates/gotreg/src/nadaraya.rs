//! Kernel-weighted Fréchet regression for a single metric-space predictor:
//! the comparison method. Weights are Gaussian in squared distance,
//! K(x, q) = exp(-d²(x, q)/τ), with τ from the per-query median heuristic
//! unless fixed explicitly.

use crate::error::{Error, Result};
use crate::space::{self, SpacePoint};
use serde::{Deserialize, Serialize};

/// Kernel scale: a fixed positive value or the per-query median heuristic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauSpec {
    #[default]
    Median,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct NwConfig {
    pub tau: TauSpec,
}

/// Median of the distances from the training predictors to the query
/// (even count: average of the two middle values).
pub fn median_tau(train_x: &[SpacePoint], query: &SpacePoint) -> Result<f64> {
    if train_x.is_empty() {
        return Err(Error::config("median heuristic needs at least one training point"));
    }
    let mut dists = train_x
        .iter()
        .map(|x| space::distance(x, query))
        .collect::<Result<Vec<f64>>>()?;
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = dists.len();
    let median = if n % 2 == 1 {
        dists[n / 2]
    } else {
        0.5 * (dists[n / 2 - 1] + dists[n / 2])
    };
    if median <= 0.0 {
        return Err(Error::numeric(
            "median of training distances is zero; pass an explicit tau",
        ));
    }
    Ok(median)
}

/// Kernel-weighted Fréchet mean of the training responses at the query.
pub fn nw_predict(
    train_x: &[SpacePoint],
    train_y: &[SpacePoint],
    query: &SpacePoint,
    config: &NwConfig,
) -> Result<SpacePoint> {
    if train_x.is_empty() || train_x.len() != train_y.len() {
        return Err(Error::config(format!(
            "training set sizes disagree or are empty: {} predictors, {} responses",
            train_x.len(),
            train_y.len()
        )));
    }
    let tau = match config.tau {
        TauSpec::Fixed(t) if t > 0.0 && t.is_finite() => t,
        TauSpec::Fixed(t) => {
            return Err(Error::config(format!("tau must be positive and finite, got {t}")))
        }
        TauSpec::Median => {
            if train_x.len() == 1 {
                // Single point: the weight cancels; any scale works.
                1.0
            } else {
                median_tau(train_x, query)?
            }
        }
    };
    let weights: Vec<f64> = train_x
        .iter()
        .map(|x| space::distance(x, query).map(|d| (-d * d / tau).exp()))
        .collect::<Result<_>>()?;
    if weights.iter().all(|&w| w < 1e-300) {
        return Err(Error::numeric(
            "all kernel weights underflowed; increase tau",
        ));
    }
    space::frechet_mean(train_y, Some(&weights))
}
