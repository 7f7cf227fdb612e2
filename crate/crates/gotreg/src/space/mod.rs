//! Space contract: descriptors, points, and the shared geometric operations.
//!
//! Every backend works on flat `Vec<f64>` payloads whose interpretation is
//! fixed by the space kind: coordinates (Euclidean), quantile values
//! (Wasserstein), weighted unit vectors (sphere), or lower-triangular
//! Cholesky factors (SPD). Operations on points from different descriptors
//! are rejected rather than coerced.

pub mod euclidean;
pub mod spd;
pub mod sphere;
pub mod wasserstein;

use crate::error::{Error, Result};
use crate::isotonic::enforce_monotone;
use serde::{Deserialize, Serialize};
use sphere::Quad;
use std::sync::Arc;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// Which geometry a payload lives in, with its shape parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Euclidean {
        dim: usize,
    },
    Wasserstein {
        grid_size: usize,
        support: (f64, f64),
    },
    Sphere {
        dim: usize,
        /// Quadrature weights; absent means all-ones (plain unit vectors).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        /// Restrict to the non-negative orthant (density roots).
        #[serde(default)]
        constrained: bool,
    },
    Spd {
        size: usize,
    },
}

/// A space descriptor: kind plus the comparison tolerance used by
/// membership checks and degeneracy guards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl SpaceDescriptor {
    pub fn euclidean(dim: usize) -> Result<Arc<Self>> {
        Self::with_kind(SpaceKind::Euclidean { dim })
    }

    pub fn wasserstein(grid_size: usize, support: (f64, f64)) -> Result<Arc<Self>> {
        Self::with_kind(SpaceKind::Wasserstein { grid_size, support })
    }

    pub fn sphere(dim: usize) -> Result<Arc<Self>> {
        Self::with_kind(SpaceKind::Sphere { dim, weights: None, constrained: false })
    }

    pub fn sphere_weighted(
        dim: usize,
        weights: Vec<f64>,
        constrained: bool,
    ) -> Result<Arc<Self>> {
        Self::with_kind(SpaceKind::Sphere { dim, weights: Some(weights), constrained })
    }

    pub fn spd(size: usize) -> Result<Arc<Self>> {
        Self::with_kind(SpaceKind::Spd { size })
    }

    pub fn with_kind(kind: SpaceKind) -> Result<Arc<Self>> {
        Self::from_parts(kind, DEFAULT_TOLERANCE)
    }

    /// Rebuild a descriptor (e.g. from a serialized document), keeping its
    /// stored tolerance.
    pub fn from_parts(kind: SpaceKind, tolerance: f64) -> Result<Arc<Self>> {
        let desc = SpaceDescriptor { kind, tolerance };
        desc.validate()?;
        Ok(Arc::new(desc))
    }

    /// Structural sanity of the descriptor itself.
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::config(format!(
                "descriptor tolerance {} must be positive and finite",
                self.tolerance
            )));
        }
        match &self.kind {
            SpaceKind::Euclidean { dim } => {
                if *dim == 0 {
                    return Err(Error::config("euclidean dimension must be at least 1"));
                }
            }
            SpaceKind::Wasserstein { grid_size, support } => {
                if *grid_size < 2 {
                    return Err(Error::config("quantile grid needs at least 2 levels"));
                }
                let (s1, s2) = *support;
                if !(s1.is_finite() && s2.is_finite() && s1 < s2) {
                    return Err(Error::config(format!(
                        "support [{s1}, {s2}] must be a finite non-empty interval"
                    )));
                }
            }
            SpaceKind::Sphere { dim, weights, .. } => {
                if *dim < 2 {
                    return Err(Error::config("sphere dimension must be at least 2"));
                }
                if let Some(w) = weights {
                    if w.len() != *dim {
                        return Err(Error::config(format!(
                            "sphere weight vector length {} does not match dimension {dim}",
                            w.len()
                        )));
                    }
                    if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                        return Err(Error::config("sphere weights must be positive and finite"));
                    }
                }
            }
            SpaceKind::Spd { size } => {
                if *size == 0 {
                    return Err(Error::config("matrix size must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// Payload length required for a member of this space.
    pub fn payload_len(&self) -> usize {
        match &self.kind {
            SpaceKind::Euclidean { dim } => *dim,
            SpaceKind::Wasserstein { grid_size, .. } => *grid_size,
            SpaceKind::Sphere { dim, .. } => *dim,
            SpaceKind::Spd { size } => spd::payload_len(*size),
        }
    }

    pub(crate) fn quad(&self) -> Quad<'_> {
        match &self.kind {
            SpaceKind::Sphere { weights, .. } => Quad(weights.as_deref()),
            _ => Quad(None),
        }
    }

    /// Membership check for a raw payload.
    pub fn validate_payload(&self, payload: &[f64]) -> Result<()> {
        match &self.kind {
            SpaceKind::Euclidean { dim } => {
                if payload.len() != *dim {
                    return Err(Error::geometry(format!(
                        "vector length {} does not match dimension {dim}",
                        payload.len()
                    )));
                }
                if payload.iter().any(|v| !v.is_finite()) {
                    return Err(Error::geometry("non-finite coordinate"));
                }
                Ok(())
            }
            SpaceKind::Wasserstein { grid_size, support } => {
                wasserstein::validate(payload, *grid_size, *support, self.tolerance)
            }
            SpaceKind::Sphere { dim, constrained, .. } => {
                sphere::validate(payload, *dim, self.quad(), *constrained, self.tolerance)
            }
            SpaceKind::Spd { size } => spd::validate(payload, *size, self.tolerance),
        }
    }
}

/// A point of a space: shared descriptor plus payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpacePoint {
    pub space: Arc<SpaceDescriptor>,
    pub payload: Vec<f64>,
}

impl SpacePoint {
    /// Validating constructor.
    pub fn new(space: Arc<SpaceDescriptor>, payload: Vec<f64>) -> Result<Self> {
        space.validate_payload(&payload)?;
        Ok(SpacePoint { space, payload })
    }

    /// Constructor for payloads produced by the library's own operations,
    /// which maintain membership invariants.
    pub(crate) fn trusted(space: Arc<SpaceDescriptor>, payload: Vec<f64>) -> Self {
        debug_assert!(space.validate_payload(&payload).is_ok());
        SpacePoint { space, payload }
    }

    pub fn distance(&self, other: &SpacePoint) -> Result<f64> {
        distance(self, other)
    }
}

fn check_same_space(a: &SpacePoint, b: &SpacePoint) -> Result<()> {
    if Arc::ptr_eq(&a.space, &b.space) || a.space == b.space {
        Ok(())
    } else {
        Err(Error::mismatch(format!(
            "{:?} vs {:?}",
            a.space.kind, b.space.kind
        )))
    }
}

/// Geodesic distance between two points of the same space.
pub fn distance(a: &SpacePoint, b: &SpacePoint) -> Result<f64> {
    check_same_space(a, b)?;
    let d = match &a.space.kind {
        SpaceKind::Euclidean { .. } => euclidean::distance(&a.payload, &b.payload),
        SpaceKind::Wasserstein { .. } => wasserstein::distance(&a.payload, &b.payload),
        SpaceKind::Sphere { .. } => sphere::distance(&a.payload, &b.payload, a.space.quad()),
        SpaceKind::Spd { size } => spd::distance(&a.payload, &b.payload, *size),
    };
    Ok(d)
}

/// Point at parameter `t` on the geodesic from `a` to `b`. Parameters
/// outside [0, 1] extrapolate where membership permits, with boundary
/// repair in bounded spaces.
pub fn geodesic_point(a: &SpacePoint, b: &SpacePoint, t: f64) -> Result<SpacePoint> {
    check_same_space(a, b)?;
    if !t.is_finite() {
        return Err(Error::config(format!("geodesic parameter {t} must be finite")));
    }
    let payload = match &a.space.kind {
        SpaceKind::Euclidean { .. } => euclidean::geodesic_point(&a.payload, &b.payload, t),
        SpaceKind::Wasserstein { support, .. } => {
            wasserstein::mccann(&a.payload, &b.payload, t, *support)
        }
        SpaceKind::Sphere { constrained, .. } => {
            let out = sphere::geodesic_point(&a.payload, &b.payload, t, a.space.quad())?;
            if *constrained && !(0.0..=1.0).contains(&t) {
                sphere::project_nonneg(&out, a.space.quad())?
            } else {
                out
            }
        }
        SpaceKind::Spd { size } => spd::geodesic_point(&a.payload, &b.payload, t, *size),
    };
    Ok(SpacePoint::trusted(a.space.clone(), payload))
}

/// Transfer of `w3` along the ordered pair (`w1`, `w2`): the point playing
/// the role for `w3` that `w2` plays for `w1`.
pub fn ubiquity(w1: &SpacePoint, w2: &SpacePoint, w3: &SpacePoint) -> Result<SpacePoint> {
    check_same_space(w1, w2)?;
    check_same_space(w1, w3)?;
    let payload = match &w1.space.kind {
        SpaceKind::Euclidean { .. } => {
            euclidean::ubiquity(&w1.payload, &w2.payload, &w3.payload)
        }
        SpaceKind::Wasserstein { support, .. } => {
            wasserstein::ubiquity(&w1.payload, &w2.payload, &w3.payload, *support)
        }
        SpaceKind::Sphere { constrained, .. } => sphere::ubiquity(
            &w1.payload,
            &w2.payload,
            &w3.payload,
            w1.space.quad(),
            *constrained,
        )?,
        SpaceKind::Spd { size } => spd::ubiquity(&w1.payload, &w2.payload, &w3.payload, *size),
    };
    Ok(SpacePoint::trusted(w1.space.clone(), payload))
}

/// Weighted Fréchet mean. `weights` defaults to uniform; it must match the
/// point count, be non-negative, and have positive sum.
pub fn frechet_mean(points: &[SpacePoint], weights: Option<&[f64]>) -> Result<SpacePoint> {
    if points.is_empty() {
        return Err(Error::config("mean of an empty point set"));
    }
    for p in &points[1..] {
        check_same_space(&points[0], p)?;
    }
    let uniform;
    let w = match weights {
        Some(w) => {
            if w.len() != points.len() {
                return Err(Error::config(format!(
                    "{} weights for {} points",
                    w.len(),
                    points.len()
                )));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::config("mean weights must be non-negative and finite"));
            }
            if w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::config("mean weights must have positive sum"));
            }
            w
        }
        None => {
            uniform = vec![1.0; points.len()];
            &uniform
        }
    };
    let payloads: Vec<&[f64]> = points.iter().map(|p| p.payload.as_slice()).collect();
    let space = &points[0].space;
    let payload = match &space.kind {
        SpaceKind::Euclidean { .. } => euclidean::frechet_mean(&payloads, w),
        SpaceKind::Wasserstein { .. } => wasserstein::frechet_mean(&payloads, w),
        SpaceKind::Sphere { constrained, .. } => {
            sphere::frechet_mean(&payloads, w, space.quad(), *constrained)?
        }
        SpaceKind::Spd { size } => spd::frechet_mean(&payloads, w, *size),
    };
    Ok(SpacePoint::trusted(space.clone(), payload))
}

/// Projection onto the space's constraint set: clamping for Wasserstein
/// supports, orthant projection for constrained spheres, identity elsewhere.
pub fn project(w: &SpacePoint) -> Result<SpacePoint> {
    let payload = match &w.space.kind {
        SpaceKind::Euclidean { .. } | SpaceKind::Spd { .. } => w.payload.clone(),
        SpaceKind::Wasserstein { support, .. } => {
            let mut out = w.payload.clone();
            wasserstein::clamp_to_support(&mut out, *support);
            enforce_monotone(&mut out);
            out
        }
        SpaceKind::Sphere { constrained, .. } => {
            if *constrained {
                sphere::project_nonneg(&w.payload, w.space.quad())?
            } else {
                w.payload.clone()
            }
        }
    };
    Ok(SpacePoint::trusted(w.space.clone(), payload))
}
