//! Mean-preserving random perturbations: the noise model for synthetic
//! data. Each space gets a construction whose Fréchet mean is the
//! unperturbed point — exactly in flat and quantile-linear geometries, to
//! first order on the sphere (the curvature bias is quadratic in the
//! amplitude).

use crate::error::{Error, Result};
use crate::isotonic::enforce_monotone;
use crate::space::sphere::{self, Quad};
use crate::space::spd;
use crate::space::wasserstein;
use crate::space::{SpaceKind, SpacePoint};
use rand::Rng;

/// Amplitude of the perturbation; the construction per space is fixed (see
/// module doc). Zero amplitude is the identity map.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationSpec {
    pub sigma: f64,
}

const MEMBERSHIP_RESAMPLES: usize = 100;

/// Apply one random perturbation to `z`, drawing from `rng`.
pub fn perturb<R: Rng>(z: &SpacePoint, spec: PerturbationSpec, rng: &mut R) -> Result<SpacePoint> {
    let sigma = spec.sigma;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::config(format!(
            "perturbation amplitude {sigma} must be non-negative and finite"
        )));
    }
    if sigma == 0.0 {
        return Ok(z.clone());
    }
    match &z.space.kind {
        SpaceKind::Euclidean { .. } => {
            // Zero-mean uniform noise per coordinate: mean preserved exactly.
            let payload = z
                .payload
                .iter()
                .map(|v| v + rng.gen_range(-sigma..=sigma))
                .collect();
            Ok(SpacePoint::trusted(z.space.clone(), payload))
        }
        SpaceKind::Spd { size } => {
            // Same construction in the flat chart coordinates.
            let mut coords = spd::chart(&z.payload, *size);
            for c in coords.iter_mut() {
                *c += rng.gen_range(-sigma..=sigma);
            }
            Ok(SpacePoint::trusted(z.space.clone(), spd::unchart(&coords, *size)))
        }
        SpaceKind::Wasserstein { grid_size, support } => {
            // Add a smooth random function of the level, V(u) = sum of the
            // first three sine modes with uniform zero-mean coefficients;
            // zero mean pointwise in quantile space fixes the Fréchet mean
            // exactly. Repair order and clamp afterwards.
            let m = *grid_size;
            let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-sigma..=sigma)).collect();
            let mut payload: Vec<f64> = z
                .payload
                .iter()
                .enumerate()
                .map(|(k, q)| {
                    let u = (2 * k + 1) as f64 / (2 * m) as f64;
                    let v: f64 = xi
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c * ((j + 1) as f64 * std::f64::consts::PI * u).sin())
                        .sum();
                    q + v
                })
                .collect();
            enforce_monotone(&mut payload);
            wasserstein::clamp_to_support(&mut payload, *support);
            Ok(SpacePoint::trusted(z.space.clone(), payload))
        }
        SpaceKind::Sphere { weights, constrained, .. } => {
            let quad = Quad(weights.as_deref());
            for _ in 0..MEMBERSHIP_RESAMPLES {
                // Symmetric ambient noise projected to the tangent space,
                // pushed through the exponential map. The tangent draw has
                // zero mean, so the Fréchet mean is preserved to first order.
                let ambient: Vec<f64> = (0..z.payload.len())
                    .map(|_| rng.gen_range(-sigma..=sigma))
                    .collect();
                let along = quad.dot(&ambient, &z.payload);
                let tangent: Vec<f64> = ambient
                    .iter()
                    .zip(&z.payload)
                    .map(|(a, p)| a - along * p)
                    .collect();
                let moved = sphere::exp_map(&z.payload, &tangent, quad);
                if !constrained || moved.iter().all(|&c| c >= 0.0) {
                    return Ok(SpacePoint::trusted(z.space.clone(), moved));
                }
            }
            Err(Error::geometry(format!(
                "perturbation left the non-negative orthant in {MEMBERSHIP_RESAMPLES} \
                 consecutive draws; reduce the amplitude ({sigma})"
            )))
        }
    }
}
