//! Synthetic data generation: predictors drawn around fixed population
//! anchors, responses built exactly from the transport-chain model at the
//! population means, then perturbed by a mean-preserving noise map.

use crate::error::{Error, Result};
use crate::harness::perturb::{perturb, PerturbationSpec};
use crate::space::spd;
use crate::space::wasserstein::midpoint_levels;
use crate::space::{SpaceDescriptor, SpaceKind, SpacePoint};
use crate::transport::{chain_apply, GeodesicTransport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};
use std::sync::Arc;

/// The quantities the generator used: population anchors, base point, true
/// coefficients and ordering, and the noise amplitude.
#[derive(Clone, Debug)]
pub struct GeneratingTruth {
    pub mu: Vec<SpacePoint>,
    pub nu: SpacePoint,
    pub alpha_star: Vec<f64>,
    pub ordering_star: Vec<usize>,
    pub sigma: f64,
}

#[derive(Clone, Debug)]
pub struct SimulatedDataset {
    pub x: Vec<Vec<SpacePoint>>,
    pub y: Vec<SpacePoint>,
    pub truth: GeneratingTruth,
}

const GENERATION_RETRIES: usize = 100;

/// Population anchors for each space: deterministic, so every replication
/// of an experiment shares the same truth.
pub fn population_truth(
    space: &Arc<SpaceDescriptor>,
    p: usize,
    alpha_star: &[f64],
    ordering_star: &[usize],
    sigma: f64,
) -> Result<GeneratingTruth> {
    if alpha_star.len() != p || ordering_star.len() != p {
        return Err(Error::config(format!(
            "need {p} coefficients and ordering entries, got {} and {}",
            alpha_star.len(),
            ordering_star.len()
        )));
    }
    let mut seen = vec![false; p];
    for &j in ordering_star {
        if j >= p || seen[j] {
            return Err(Error::config(format!(
                "ordering {ordering_star:?} is not a permutation of 0..{p}"
            )));
        }
        seen[j] = true;
    }
    if let Some(bad) = alpha_star.iter().find(|a| !a.is_finite()) {
        return Err(Error::config(format!("non-finite coefficient {bad}")));
    }

    let (mu_payload, nu_payload): (Vec<f64>, Vec<f64>) = match &space.kind {
        SpaceKind::Euclidean { dim } => (vec![0.0; *dim], vec![0.5; *dim]),
        SpaceKind::Wasserstein { grid_size, .. } => {
            let z = standard_normal_quantiles(*grid_size);
            // Mean predictor: unit-scale normal; base point: narrower,
            // strictly inside the mean's quantile range.
            (z.clone(), z.iter().map(|v| 0.3 * v).collect())
        }
        SpaceKind::Sphere { dim, weights, .. } => {
            let mu = uniform_direction(*dim, weights.as_deref());
            let mut nu_raw: Vec<f64> = (0..*dim)
                .map(|i| if i == 0 { 2.0 } else { 1.0 })
                .collect();
            normalize_weighted(&mut nu_raw, weights.as_deref());
            (mu, nu_raw)
        }
        SpaceKind::Spd { size } => {
            let chart_dim = size * (size + 1) / 2;
            (
                spd::unchart(&vec![0.0; chart_dim], *size),
                spd::unchart(&vec![0.1; chart_dim], *size),
            )
        }
    };
    let mu_point = SpacePoint::new(space.clone(), mu_payload)?;
    let nu = SpacePoint::new(space.clone(), nu_payload)?;
    Ok(GeneratingTruth {
        mu: vec![mu_point; p],
        nu,
        alpha_star: alpha_star.to_vec(),
        ordering_star: ordering_star.to_vec(),
        sigma,
    })
}

fn standard_normal_quantiles(m: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    midpoint_levels(m)
        .into_iter()
        .map(|u| normal.inverse_cdf(u))
        .collect()
}

fn uniform_direction(dim: usize, weights: Option<&[f64]>) -> Vec<f64> {
    let mut v = vec![1.0; dim];
    normalize_weighted(&mut v, weights);
    v
}

fn normalize_weighted(v: &mut [f64], weights: Option<&[f64]>) {
    let norm_sq: f64 = match weights {
        Some(w) => v.iter().zip(w).map(|(x, wi)| wi * x * x).sum(),
        None => v.iter().map(|x| x * x).sum(),
    };
    let norm = norm_sq.sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// One predictor draw around the anchor, per-space generator.
fn draw_predictor<R: Rng>(
    space: &Arc<SpaceDescriptor>,
    anchor: &SpacePoint,
    rng: &mut R,
) -> Result<SpacePoint> {
    match &space.kind {
        SpaceKind::Euclidean { dim } => {
            let payload = (0..*dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            Ok(SpacePoint::trusted(space.clone(), payload))
        }
        SpaceKind::Wasserstein { grid_size, support } => {
            // Normal quantile vector with random location and scale,
            // truncated to the declared support by clamping.
            let loc = rng.gen_range(-1.5..=1.5);
            let scale = rng.gen_range(0.6..=1.4);
            let z = standard_normal_quantiles(*grid_size);
            let (s1, s2) = *support;
            let payload = z
                .iter()
                .map(|v| (loc + scale * v).clamp(s1, s2))
                .collect();
            Ok(SpacePoint::trusted(space.clone(), payload))
        }
        SpaceKind::Sphere { .. } => {
            // Geodesic scatter around the anchor via the perturbation map.
            perturb(anchor, PerturbationSpec { sigma: 0.25 }, rng)
        }
        SpaceKind::Spd { size } => {
            let chart_dim = size * (size + 1) / 2;
            let coords: Vec<f64> = (0..chart_dim)
                .map(|_| rng.gen_range(-0.5..=0.5))
                .collect();
            Ok(SpacePoint::trusted(space.clone(), spd::unchart(&coords, *size)))
        }
    }
}

/// Generate a dataset from an existing truth with the caller's RNG (shared
/// by experiments so train and test sets come from independent streams).
pub fn simulate_from_truth<R: Rng>(
    truth: &GeneratingTruth,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<Vec<SpacePoint>>, Vec<SpacePoint>)> {
    let space = truth.nu.space.clone();
    let p = truth.mu.len();
    let spec = PerturbationSpec { sigma: truth.sigma };
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut made = false;
        for _attempt in 0..GENERATION_RETRIES {
            let row: Vec<SpacePoint> = (0..p)
                .map(|j| draw_predictor(&space, &truth.mu[j], rng))
                .collect::<Result<_>>()?;
            let outcome = (|| -> Result<SpacePoint> {
                let transports: Vec<GeodesicTransport> = row
                    .iter()
                    .enumerate()
                    .map(|(j, xij)| {
                        GeodesicTransport::new(truth.mu[j].clone(), xij.clone())
                    })
                    .collect::<Result<_>>()?;
                let pairs: Vec<(f64, &GeodesicTransport)> = truth
                    .ordering_star
                    .iter()
                    .zip(&truth.alpha_star)
                    .map(|(&j, &a)| (a, &transports[j]))
                    .collect();
                let base = chain_apply(&pairs, &truth.nu)?;
                perturb(&base, spec, rng)
            })();
            match outcome {
                Ok(yi) => {
                    x.push(row);
                    y.push(yi);
                    made = true;
                    break;
                }
                Err(Error::Geometry(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !made {
            return Err(Error::geometry(format!(
                "failed to generate a valid observation in {GENERATION_RETRIES} attempts"
            )));
        }
    }
    Ok((x, y))
}

/// Generate a full dataset: anchors from `population_truth`, draws from a
/// fresh stream seeded by `seed`.
pub fn simulate_got(
    space: &Arc<SpaceDescriptor>,
    n: usize,
    p: usize,
    alpha_star: &[f64],
    ordering_star: &[usize],
    sigma: f64,
    seed: u64,
) -> Result<SimulatedDataset> {
    let truth = population_truth(space, p, alpha_star, ordering_star, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, y) = simulate_from_truth(&truth, n, &mut rng)?;
    Ok(SimulatedDataset { x, y, truth })
}
