//! Transport algebra: pairs of points acting as maps, scalar multiples of
//! those maps, and composition chains.
//!
//! A transport is stored as its (source, target) pair and re-derived on
//! application; the regression model is a chain of coefficient-scaled
//! transports applied right to left. Scalar multiplication follows the
//! fraction-of-the-geodesic rule: for 0 < a < 1 the transport aims at the
//! geodesic point at parameter `a` (on the sphere: walks the geodesic toward
//! the fully transported image, which is what keeps the interpolation
//! consistency law exact there); for negative coefficients it applies the
//! inverse; for |a| > 1 it applies full copies first and the fractional
//! remainder last.

use crate::error::{Error, Result};
use crate::space::{self, SpaceKind, SpacePoint};
use crate::space::sphere;
use crate::space::wasserstein::{self, MonotoneMap};

/// Transport acting along the geodesic from `source` to `target`.
///
/// For Wasserstein points the forward map and the source's self-map are
/// sampled once at construction; other backends recompute on application
/// (cheap closed forms).
#[derive(Clone, Debug)]
pub struct GeodesicTransport {
    pub source: SpacePoint,
    pub target: SpacePoint,
    cache: Option<WassersteinCache>,
}

#[derive(Clone, Debug)]
struct WassersteinCache {
    to_target: MonotoneMap,
    /// Map of the source onto itself; mixing it with `to_target` yields the
    /// map toward any geodesic point of the pair (the map is linear in the
    /// target's quantiles), so scaled applications reuse both.
    to_self: MonotoneMap,
}

impl GeodesicTransport {
    pub fn new(source: SpacePoint, target: SpacePoint) -> Result<Self> {
        check_same(&source, &target)?;
        let cache = match &source.space.kind {
            SpaceKind::Wasserstein { support, .. } => Some(WassersteinCache {
                to_target: wasserstein::transport_map(
                    &source.payload,
                    &target.payload,
                    *support,
                ),
                to_self: wasserstein::transport_map(
                    &source.payload,
                    &source.payload,
                    *support,
                ),
            }),
            SpaceKind::Sphere { .. } => {
                // Fail fast on antipodal pairs; the rotation is rebuilt per
                // application.
                sphere_quad_probe(&source, &target)?;
                None
            }
            _ => None,
        };
        Ok(GeodesicTransport { source, target, cache })
    }

    /// Full application: transfer `w` along the pair.
    pub fn apply(&self, w: &SpacePoint) -> Result<SpacePoint> {
        check_same(&self.source, w)?;
        if let Some(cache) = &self.cache {
            let payload = wasserstein::apply_pushforward(&cache.to_target, &w.payload);
            return Ok(SpacePoint::trusted(w.space.clone(), payload));
        }
        space::ubiquity(&self.source, &self.target, w)
    }

    /// The transport along the reversed pair.
    pub fn invert(&self) -> Result<GeodesicTransport> {
        GeodesicTransport::new(self.target.clone(), self.source.clone())
    }

    /// Application of the fraction `a` in (0, 1]: transport toward the
    /// geodesic point at `a` (flat and quantile geometries), or the geodesic
    /// walk toward the fully transported image (sphere).
    fn apply_fraction(&self, a: f64, w: &SpacePoint) -> Result<SpacePoint> {
        match &self.source.space.kind {
            SpaceKind::Wasserstein { .. } => {
                let cache = self.cache.as_ref().expect("cache built at construction");
                let partial = cache.to_self.affine_mix(&cache.to_target, a);
                let payload = wasserstein::apply_pushforward(&partial, &w.payload);
                Ok(SpacePoint::trusted(w.space.clone(), payload))
            }
            SpaceKind::Sphere { .. } => {
                let image = self.apply(w)?;
                space::geodesic_point(w, &image, a)
            }
            _ => {
                let midpoint = space::geodesic_point(&self.source, &self.target, a)?;
                space::ubiquity(&self.source, &midpoint, w)
            }
        }
    }
}

fn check_same(a: &SpacePoint, b: &SpacePoint) -> Result<()> {
    if *a.space == *b.space {
        Ok(())
    } else {
        Err(Error::mismatch(format!(
            "{:?} vs {:?}",
            a.space.kind, b.space.kind
        )))
    }
}

fn sphere_quad_probe(source: &SpacePoint, target: &SpacePoint) -> Result<()> {
    if let SpaceKind::Sphere { weights, .. } = &source.space.kind {
        let quad = sphere::Quad(weights.as_deref());
        sphere::rotation_between(&source.payload, &target.payload, quad)?;
    }
    Ok(())
}

/// Scalar multiple of a transport applied to `w`.
///
/// `alpha = 0` is the identity; negative values apply the inverse transport
/// with |alpha|; values beyond 1 apply floor(|alpha|) full copies first and
/// the fractional remainder on the result.
pub fn scale_apply(alpha: f64, transport: &GeodesicTransport, w: &SpacePoint) -> Result<SpacePoint> {
    if !alpha.is_finite() {
        return Err(Error::config(format!("transport coefficient {alpha} must be finite")));
    }
    if alpha == 0.0 {
        check_same(&transport.source, w)?;
        return Ok(w.clone());
    }
    if alpha < 0.0 {
        return scale_apply(-alpha, &transport.invert()?, w);
    }
    let whole = alpha.floor() as u64;
    let frac = alpha - alpha.floor();
    let mut current = w.clone();
    for _ in 0..whole {
        current = transport.apply(&current)?;
    }
    if frac > 0.0 {
        current = transport.apply_fraction(frac, &current)?;
    }
    Ok(current)
}

/// A transport with its coefficient.
#[derive(Clone, Debug)]
pub struct ScaledTransport {
    pub transport: GeodesicTransport,
    pub coefficient: f64,
}

impl ScaledTransport {
    pub fn apply(&self, w: &SpacePoint) -> Result<SpacePoint> {
        scale_apply(self.coefficient, &self.transport, w)
    }
}

/// Ordered composition of scaled transports, applied right to left: the
/// last element acts on the argument first. The fitter appends newly
/// selected predictors at the end, so they touch the base point first.
#[derive(Clone, Debug, Default)]
pub struct TransportChain {
    pub elements: Vec<ScaledTransport>,
}

impl TransportChain {
    pub fn new(elements: Vec<ScaledTransport>) -> Self {
        TransportChain { elements }
    }

    pub fn push(&mut self, element: ScaledTransport) {
        self.elements.push(element);
    }

    pub fn apply(&self, w: &SpacePoint) -> Result<SpacePoint> {
        let mut current = w.clone();
        for el in self.elements.iter().rev() {
            current = el.apply(&current)?;
        }
        Ok(current)
    }
}

/// Chain application without owning the transports: `pairs` lists
/// (coefficient, transport) in chain order, applied right to left. The
/// fitter uses this to rescore one shared transport set under many
/// coefficient vectors.
pub fn chain_apply(pairs: &[(f64, &GeodesicTransport)], w: &SpacePoint) -> Result<SpacePoint> {
    let mut current = w.clone();
    for (alpha, transport) in pairs.iter().rev() {
        current = scale_apply(*alpha, transport, &current)?;
    }
    Ok(current)
}
