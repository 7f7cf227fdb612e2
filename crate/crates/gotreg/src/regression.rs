//! Transport-chain regression: estimates base and predictor means, selects
//! the predictor ordering greedily by empirical loss, and estimates the
//! coefficient vector over a compact box.
//!
//! The fitted model represents each observation's predictors as transports
//! from the predictor means, composes them in the selected order with
//! scalar coefficients, and applies the chain to the estimated base point.
//! Everything is deterministic given the inputs and configuration; the seed
//! is carried only so downstream simulation records provenance.

use crate::error::{Error, Result};
use crate::optim::{self, NelderMeadConfig};
use crate::space::{self, SpaceDescriptor, SpacePoint};
use crate::transport::{chain_apply, GeodesicTransport};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Fitting controls. The box is [-alpha_bound, alpha_bound] per coordinate;
/// the coarse grid seeds the multi-start search in each stage.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitConfig {
    pub alpha_bound: f64,
    pub coarse_grid: Vec<f64>,
    pub simplex_tolerance: f64,
    pub max_simplex_iterations: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            alpha_bound: 2.0,
            coarse_grid: vec![-1.5, -0.75, 0.0, 0.75, 1.5],
            simplex_tolerance: 1e-6,
            max_simplex_iterations: 500,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_bound > 0.0 && self.alpha_bound.is_finite()) {
            return Err(Error::config("alpha_bound must be positive and finite"));
        }
        if let Some(bad) = self
            .coarse_grid
            .iter()
            .find(|g| !g.is_finite() || g.abs() > self.alpha_bound)
        {
            return Err(Error::config(format!(
                "coarse grid point {bad} outside [-{0}, {0}]",
                self.alpha_bound
            )));
        }
        if !(self.simplex_tolerance > 0.0) {
            return Err(Error::config("simplex_tolerance must be positive"));
        }
        if self.max_simplex_iterations == 0 {
            return Err(Error::config("max_simplex_iterations must be at least 1"));
        }
        Ok(())
    }

    fn nm(&self) -> NelderMeadConfig {
        NelderMeadConfig {
            tolerance: self.simplex_tolerance,
            max_iterations: self.max_simplex_iterations,
            initial_step: 0.25,
        }
    }
}

/// Fit-time observations that are not part of the model proper.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Optimal loss after each selection stage (last entry = training loss).
    pub stage_losses: Vec<f64>,
    /// Best-vs-second-best loss gap at each stage that had a choice
    /// (length p-1); small gaps mean the ordering is weakly identified.
    pub stage_gaps: Vec<f64>,
    /// 0-based indices of predictors pinned to coefficient 0 because every
    /// observation coincided with the predictor mean.
    pub degenerate: Vec<usize>,
    pub warnings: Vec<String>,
    pub converged: bool,
}

/// Fitted model. `ordering` is 0-based internally (1-based in documents);
/// `alpha[k]` is the coefficient of predictor `ordering[k]`; `mu_hat` stays
/// in original predictor order.
#[derive(Clone, Debug)]
pub struct GotModel {
    pub space: Arc<SpaceDescriptor>,
    pub ordering: Vec<usize>,
    pub alpha: Vec<f64>,
    pub mu_hat: Vec<SpacePoint>,
    pub nu_hat: SpacePoint,
    pub training_loss: f64,
    pub config: FitConfig,
    pub diagnostics: FitDiagnostics,
}

/// Coefficient estimate with its achieved loss.
#[derive(Clone, Debug)]
pub struct AlphaEstimate {
    pub alpha: Vec<f64>,
    pub loss: f64,
    pub converged: bool,
}

/// Shared evaluator: the transports from each predictor mean to each
/// observation, built once, scored under many (ordering, coefficient)
/// proposals. Indices follow the original predictor order.
pub struct LossProblem {
    transports: Vec<Vec<GeodesicTransport>>,
    y: Vec<SpacePoint>,
    nu: SpacePoint,
}

impl LossProblem {
    pub fn new(
        x: &[Vec<SpacePoint>],
        y: &[SpacePoint],
        mu_hat: &[SpacePoint],
        nu_hat: &SpacePoint,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::config(format!(
                "{} predictor rows vs {} responses",
                x.len(),
                y.len()
            )));
        }
        let p = mu_hat.len();
        let mut transports = Vec::with_capacity(x.len());
        for row in x {
            if row.len() != p {
                return Err(Error::config(format!(
                    "predictor row has {} entries, expected {p}",
                    row.len()
                )));
            }
            let mut ts = Vec::with_capacity(p);
            for (j, xij) in row.iter().enumerate() {
                ts.push(GeodesicTransport::new(mu_hat[j].clone(), xij.clone())?);
            }
            transports.push(ts);
        }
        Ok(LossProblem {
            transports,
            y: y.to_vec(),
            nu: nu_hat.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Mean squared distance between responses and the chain's output.
    /// Geometry failures inside a proposal (e.g. an antipodal intermediate)
    /// score as +inf so the optimizer steers away from them.
    pub fn loss(&self, ordering: &[usize], coeffs: &[f64]) -> f64 {
        debug_assert_eq!(ordering.len(), coeffs.len());
        let n = self.y.len();
        let mut total = 0.0;
        for i in 0..n {
            let pairs: Vec<(f64, &GeodesicTransport)> = ordering
                .iter()
                .zip(coeffs)
                .map(|(&j, &a)| (a, &self.transports[i][j]))
                .collect();
            let fitted = match chain_apply(&pairs, &self.nu) {
                Ok(point) => point,
                Err(_) => return f64::INFINITY,
            };
            let d = match space::distance(&self.y[i], &fitted) {
                Ok(d) => d,
                Err(_) => return f64::INFINITY,
            };
            total += d * d;
        }
        total / n as f64
    }

    /// Minimize the loss over the coefficients of `ordering`, holding
    /// coordinates marked in `pinned` at zero. Multi-start: warm starts
    /// first (in the order given), then coarse-grid seeds ranked by loss
    /// (cap 64), reduced by first-found minimum.
    pub fn minimize(
        &self,
        ordering: &[usize],
        pinned: &[bool],
        warms: &[Vec<f64>],
        config: &FitConfig,
    ) -> AlphaEstimate {
        let dim = ordering.len();
        debug_assert_eq!(pinned.len(), dim);
        let free: Vec<usize> = (0..dim).filter(|&k| !pinned[k]).collect();
        if free.is_empty() {
            let coeffs = vec![0.0; dim];
            let loss = self.loss(ordering, &coeffs);
            return AlphaEstimate { alpha: coeffs, loss, converged: true };
        }

        let expand = |z: &[f64]| -> Vec<f64> {
            let mut full = vec![0.0; dim];
            for (slot, &zi) in free.iter().zip(z) {
                full[*slot] = zi;
            }
            full
        };
        let objective = |z: &[f64]| self.loss(ordering, &expand(z));

        let warms_free: Vec<Vec<f64>> = warms
            .iter()
            .map(|w| free.iter().map(|&k| w[k]).collect())
            .collect();
        let starts = optim::seed_starts(
            &objective,
            &warms_free,
            &config.coarse_grid,
            free.len(),
            64,
        );
        let best = optim::multi_start_box(&objective, &starts, config.alpha_bound, &config.nm());
        AlphaEstimate {
            alpha: expand(&best.point),
            loss: best.value,
            converged: best.converged,
        }
    }
}

pub fn column_mean(x: &[Vec<SpacePoint>], j: usize) -> Result<SpacePoint> {
    let column: Vec<SpacePoint> = x.iter().map(|row| row[j].clone()).collect();
    space::frechet_mean(&column, None)
}

/// Greedy ordering selection. Stage m tries every remaining candidate at the
/// end of the chain, jointly re-optimizing all m coefficients (warm-started
/// from the previous stage), and keeps the strictly smallest loss; ties go
/// to the smallest predictor index. The final predictor is the leftover and
/// gets its coefficients from the joint refit.
pub struct OrderSelection {
    pub ordering: Vec<usize>,
    pub staged_alpha: Vec<f64>,
    pub stage_losses: Vec<f64>,
    pub stage_gaps: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn select_order(
    problem: &LossProblem,
    degenerate: &[bool],
    config: &FitConfig,
) -> OrderSelection {
    let p = degenerate.len();
    let mut remaining: Vec<usize> = (0..p).collect();
    let mut ordering: Vec<usize> = Vec::with_capacity(p);
    let mut staged_alpha: Vec<f64> = Vec::new();
    let mut stage_losses = Vec::new();
    let mut stage_gaps = Vec::new();
    let mut warnings = Vec::new();

    while ordering.len() < p {
        if remaining.len() == 1 {
            // Leftover index: coefficients come from the joint refit.
            ordering.push(remaining[0]);
            staged_alpha.push(0.0);
            stage_losses.push(problem.loss(&ordering, &staged_alpha));
            break;
        }
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        let mut second_best = f64::INFINITY;
        for &j in &remaining {
            let mut trial_order = ordering.clone();
            trial_order.push(j);
            let mut pinned: Vec<bool> = trial_order
                .iter()
                .map(|&idx| degenerate[idx])
                .collect();
            // A degenerate candidate cannot move the loss; score it at the
            // current coefficients without optimizing.
            if degenerate[j] {
                *pinned.last_mut().unwrap() = true;
            }
            let mut warm = staged_alpha.clone();
            warm.push(0.0);
            let estimate = problem.minimize(&trial_order, &pinned, &[warm], config);
            match &mut best {
                None => best = Some((estimate.loss, j, estimate.alpha)),
                Some((best_loss, _, _)) => {
                    if estimate.loss < *best_loss {
                        second_best = *best_loss;
                        best = Some((estimate.loss, j, estimate.alpha));
                    } else if estimate.loss < second_best {
                        second_best = estimate.loss;
                    }
                }
            }
        }
        let (loss, j, alpha) = best.expect("at least two candidates");
        if second_best.is_finite() && second_best == loss {
            warnings.push(format!(
                "selection tie at stage {}: losses equal, kept predictor {}",
                ordering.len() + 1,
                j + 1
            ));
        }
        stage_gaps.push(second_best - loss);
        stage_losses.push(loss);
        ordering.push(j);
        staged_alpha = alpha;
        remaining.retain(|&r| r != j);
    }

    OrderSelection {
        ordering,
        staged_alpha,
        stage_losses,
        stage_gaps,
        warnings,
    }
}

/// Coefficient estimation for a fixed ordering: multi-start simplex search
/// over the box, warm-started when a previous solution is supplied.
pub fn estimate_alpha_full(
    x: &[Vec<SpacePoint>],
    y: &[SpacePoint],
    ordering: &[usize],
    mu_hat: &[SpacePoint],
    nu_hat: &SpacePoint,
    warm: Option<&[f64]>,
    config: &FitConfig,
) -> Result<AlphaEstimate> {
    config.validate()?;
    let problem = LossProblem::new(x, y, mu_hat, nu_hat)?;
    let pinned = vec![false; ordering.len()];
    let warms: Vec<Vec<f64>> = warm.map(|w| vec![w.to_vec()]).unwrap_or_default();
    Ok(problem.minimize(ordering, &pinned, &warms, config))
}

/// Spec'd convenience form returning only the coefficient vector.
pub fn estimate_alpha(
    x: &[Vec<SpacePoint>],
    y: &[SpacePoint],
    ordering: &[usize],
    mu_hat: &[SpacePoint],
    nu_hat: &SpacePoint,
    config: &FitConfig,
) -> Result<Vec<f64>> {
    Ok(estimate_alpha_full(x, y, ordering, mu_hat, nu_hat, None, config)?.alpha)
}

/// Fit the full model: means, greedy ordering, joint coefficient refit.
pub fn fit(x: &[Vec<SpacePoint>], y: &[SpacePoint], config: &FitConfig) -> Result<GotModel> {
    config.validate()?;
    let n = y.len();
    if n < 2 {
        return Err(Error::config("need at least 2 observations"));
    }
    if x.len() != n {
        return Err(Error::config(format!(
            "{} predictor rows vs {n} responses",
            x.len()
        )));
    }
    let p = x[0].len();
    if p == 0 {
        return Err(Error::config("need at least 1 predictor"));
    }
    for row in x {
        if row.len() != p {
            return Err(Error::config("ragged predictor rows"));
        }
    }

    let mu_hat: Vec<SpacePoint> = (0..p)
        .map(|j| column_mean(x, j))
        .collect::<Result<_>>()?;
    let nu_hat = space::frechet_mean(y, None)?;

    // A predictor whose observations all coincide with its mean generates
    // only identity transports; its coefficient is unidentifiable and is
    // pinned to zero.
    let degenerate_tol = nu_hat.space.tolerance.max(1e-8);
    let mut degenerate = vec![false; p];
    let mut warnings = Vec::new();
    for j in 0..p {
        let all_at_mean = x
            .iter()
            .map(|row| space::distance(&row[j], &mu_hat[j]))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .all(|d| d <= degenerate_tol);
        if all_at_mean {
            degenerate[j] = true;
            warnings.push(format!(
                "predictor {} is constant at its mean; coefficient fixed to 0",
                j + 1
            ));
        }
    }

    let problem = LossProblem::new(x, y, &mu_hat, &nu_hat)?;
    let mut selection = select_order(&problem, &degenerate, config);
    warnings.append(&mut selection.warnings);

    // Joint refit of all coefficients, warm-started from the staged solution.
    let pinned: Vec<bool> = selection.ordering.iter().map(|&j| degenerate[j]).collect();
    let refit = problem.minimize(
        &selection.ordering,
        &pinned,
        &[selection.staged_alpha.clone()],
        config,
    );
    if !refit.converged {
        warnings.push(
            "coefficient search hit the iteration cap; returning best point found".into(),
        );
    }
    if !refit.loss.is_finite() {
        return Err(Error::numeric(
            "training loss is not finite at any searched coefficient vector",
        ));
    }
    let mut stage_losses = selection.stage_losses;
    if let Some(last) = stage_losses.last_mut() {
        *last = refit.loss;
    }

    Ok(GotModel {
        space: nu_hat.space.clone(),
        ordering: selection.ordering,
        alpha: refit.alpha,
        mu_hat,
        nu_hat,
        training_loss: refit.loss,
        config: config.clone(),
        diagnostics: FitDiagnostics {
            stage_losses,
            stage_gaps: selection.stage_gaps,
            degenerate: (0..p).filter(|&j| degenerate[j]).collect(),
            warnings,
            converged: refit.converged,
        },
    })
}

/// Predict the response at a new predictor tuple: transports from the
/// predictor means to the inputs, chained in model order, applied to the
/// base point.
pub fn predict(model: &GotModel, x: &[SpacePoint]) -> Result<SpacePoint> {
    if x.len() != model.mu_hat.len() {
        return Err(Error::config(format!(
            "prediction needs {} predictors, got {}",
            model.mu_hat.len(),
            x.len()
        )));
    }
    let transports: Vec<GeodesicTransport> = model
        .mu_hat
        .iter()
        .zip(x)
        .map(|(mu, xj)| GeodesicTransport::new(mu.clone(), xj.clone()))
        .collect::<Result<_>>()?;
    let pairs: Vec<(f64, &GeodesicTransport)> = model
        .ordering
        .iter()
        .zip(&model.alpha)
        .map(|(&j, &a)| (a, &transports[j]))
        .collect();
    chain_apply(&pairs, &model.nu_hat)
}

/// Serialized form of a fitted model: payloads only, ordering 1-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDocument {
    pub library_version: String,
    pub space: SpaceDescriptor,
    /// 1-based predictor indices in selection order.
    pub ordering: Vec<usize>,
    pub alpha: Vec<f64>,
    pub mu_hat: Vec<Vec<f64>>,
    pub nu_hat: Vec<f64>,
    pub training_loss: f64,
    pub config: FitConfig,
    pub diagnostics: FitDiagnostics,
}

impl GotModel {
    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            library_version: crate::VERSION.to_string(),
            space: (*self.space).clone(),
            ordering: self.ordering.iter().map(|j| j + 1).collect(),
            alpha: self.alpha.clone(),
            mu_hat: self.mu_hat.iter().map(|m| m.payload.clone()).collect(),
            nu_hat: self.nu_hat.payload.clone(),
            training_loss: self.training_loss,
            config: self.config.clone(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn from_document(doc: ModelDocument) -> Result<GotModel> {
        let space = SpaceDescriptor::from_parts(doc.space.kind.clone(), doc.space.tolerance)?;
        let p = doc.mu_hat.len();
        if doc.ordering.len() != p || doc.alpha.len() != p {
            return Err(Error::ingestion(format!(
                "model document inconsistent: {p} means, {} ordering entries, {} coefficients",
                doc.ordering.len(),
                doc.alpha.len()
            )));
        }
        let mut seen = vec![false; p];
        for &idx in &doc.ordering {
            if idx == 0 || idx > p || seen[idx - 1] {
                return Err(Error::ingestion(format!(
                    "ordering {:?} is not a permutation of 1..={p}",
                    doc.ordering
                )));
            }
            seen[idx - 1] = true;
        }
        for &a in &doc.alpha {
            if !a.is_finite() || a.abs() > doc.config.alpha_bound + 1e-12 {
                return Err(Error::ingestion(format!(
                    "coefficient {a} outside the configured box"
                )));
            }
        }
        let mu_hat: Vec<SpacePoint> = doc
            .mu_hat
            .into_iter()
            .map(|payload| SpacePoint::new(space.clone(), payload))
            .collect::<Result<_>>()?;
        let nu_hat = SpacePoint::new(space.clone(), doc.nu_hat)?;
        Ok(GotModel {
            space,
            ordering: doc.ordering.iter().map(|j| j - 1).collect(),
            alpha: doc.alpha,
            mu_hat,
            nu_hat,
            training_loss: doc.training_loss,
            config: doc.config,
            diagnostics: doc.diagnostics,
        })
    }
}
