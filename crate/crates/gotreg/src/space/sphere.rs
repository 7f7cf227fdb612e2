//! Hilbert sphere backend: unit vectors under a weighted inner product
//! <g, h> = sum_i w_i g_i h_i.
//!
//! Square roots of densities on a quadrature grid live here (the weights are
//! the quadrature weights), as do plain unit vectors (all-ones weights).
//! Distances are arc lengths, geodesics ride two-plane rotations, and the
//! constrained mode keeps points in the non-negative orthant (density roots).
//!
//! The transfer map rotates its argument by the full angle between the pair
//! in the pair's own plane; the partly applied transport is defined further
//! up (transport algebra) as the geodesic walk toward the rotated image,
//! which is what makes the interpolation consistency law hold on the sphere.

use crate::error::{Error, Result};

/// Pair threshold treated as antipodal (transport undefined).
pub const ANTIPODAL_TOL: f64 = 1e-8;
/// Residual norm below which two unit vectors count as colinear.
const COLINEAR_TOL: f64 = 1e-12;
/// Karcher iteration controls.
const MEAN_STEP_TOL: f64 = 1e-10;
const MEAN_MAX_ITER: usize = 1000;

/// Quadrature view: `None` means all-ones weights.
#[derive(Clone, Copy, Debug)]
pub struct Quad<'a>(pub Option<&'a [f64]>);

impl<'a> Quad<'a> {
    #[inline]
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.0 {
            None => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Some(w) => a.iter().zip(b).zip(w).map(|((x, y), wi)| wi * x * y).sum(),
        }
    }

    #[inline]
    pub fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }
}

/// Two-plane rotation data: orthonormal frame (u1, u2) of the plane spanned
/// by an ordered pair, plus the angle between the pair.
#[derive(Clone, Debug)]
pub struct RotationSpec {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub angle: f64,
}

/// Geodesic distance arccos(<g, h>), with the inner product clamped against
/// roundoff spill outside [-1, 1].
pub fn distance(g: &[f64], h: &[f64], quad: Quad) -> f64 {
    quad.dot(g, h).clamp(-1.0, 1.0).acos()
}

/// Frame of the rotation taking `g1` to `g2`.
///
/// Returns `Ok(None)` when the pair is colinear (identity rotation) and an
/// error when it is antipodal, where no unique plane exists.
pub fn rotation_between(g1: &[f64], g2: &[f64], quad: Quad) -> Result<Option<RotationSpec>> {
    let ip = quad.dot(g1, g2).clamp(-1.0, 1.0);
    if ip <= -1.0 + ANTIPODAL_TOL {
        return Err(Error::geometry(format!(
            "antipodal pair (inner product {ip:.3e}): transport direction is undefined"
        )));
    }
    // Gram-Schmidt residual of g2 against g1.
    let resid: Vec<f64> = g2.iter().zip(g1).map(|(y, x)| y - ip * x).collect();
    let rnorm = quad.norm(&resid);
    if rnorm < COLINEAR_TOL {
        return Ok(None);
    }
    let u2 = resid.iter().map(|v| v / rnorm).collect();
    Ok(Some(RotationSpec { u1: g1.to_vec(), u2, angle: ip.acos() }))
}

/// Apply the plane rotation by angle `theta` to `x`:
/// x + sin(theta) (<u1,x> u2 - <u2,x> u1) - (1-cos(theta)) (<u1,x> u1 + <u2,x> u2).
///
/// Fixes the orthogonal complement of the plane and preserves the weighted
/// norm; at `theta` equal to the frame angle it carries u1 onto the second
/// pair member.
pub fn rotate(spec: &RotationSpec, theta: f64, x: &[f64], quad: Quad) -> Vec<f64> {
    let a = quad.dot(&spec.u1, x);
    let b = quad.dot(&spec.u2, x);
    let (s, c) = theta.sin_cos();
    let k1 = -s * b - (1.0 - c) * a;
    let k2 = s * a - (1.0 - c) * b;
    x.iter()
        .zip(&spec.u1)
        .zip(&spec.u2)
        .map(|((xi, u1i), u2i)| xi + k1 * u1i + k2 * u2i)
        .collect()
}

/// Geodesic point at parameter `t` (arc fraction); extrapolates freely.
pub fn geodesic_point(g1: &[f64], g2: &[f64], t: f64, quad: Quad) -> Result<Vec<f64>> {
    match rotation_between(g1, g2, quad)? {
        None => Ok(g1.to_vec()),
        Some(spec) => Ok(rotate(&spec, t * spec.angle, g1, quad)),
    }
}

/// Transfer of `g3` along the pair (`g1`, `g2`): the full-angle rotation of
/// `g3` in the pair's plane, projected when the orthant constraint is on.
pub fn ubiquity(
    g1: &[f64],
    g2: &[f64],
    g3: &[f64],
    quad: Quad,
    constrained: bool,
) -> Result<Vec<f64>> {
    let out = match rotation_between(g1, g2, quad)? {
        None => g3.to_vec(),
        Some(spec) => rotate(&spec, spec.angle, g3, quad),
    };
    if constrained {
        project_nonneg(&out, quad)
    } else {
        Ok(out)
    }
}

/// Exponential map at `p`: cos(|v|) p + sin(|v|) v/|v|.
pub fn exp_map(p: &[f64], v: &[f64], quad: Quad) -> Vec<f64> {
    let r = quad.norm(v);
    if r < 1e-300 {
        return p.to_vec();
    }
    let (s, c) = r.sin_cos();
    let mut out: Vec<f64> = p
        .iter()
        .zip(v)
        .map(|(pi, vi)| c * pi + s * vi / r)
        .collect();
    renormalize(&mut out, quad);
    out
}

/// Logarithm map at `p`: the tangent vector pointing to `q` with norm d(p,q).
pub fn log_map(p: &[f64], q: &[f64], quad: Quad) -> Result<Vec<f64>> {
    let ip = quad.dot(p, q).clamp(-1.0, 1.0);
    if ip <= -1.0 + ANTIPODAL_TOL {
        return Err(Error::geometry("logarithm of an antipodal point is undefined"));
    }
    let theta = ip.acos();
    let resid: Vec<f64> = q.iter().zip(p).map(|(qi, pi)| qi - ip * pi).collect();
    let rnorm = quad.norm(&resid);
    if rnorm < 1e-300 {
        return Ok(vec![0.0; p.len()]);
    }
    Ok(resid.iter().map(|v| theta * v / rnorm).collect())
}

/// Weighted Karcher mean: extrinsic-mean start, then exp/log fixed-point
/// iteration until the tangent step drops below 1e-10 (at most 1000 rounds).
///
/// All points must sit inside an open hemisphere (checked pairwise).
pub fn frechet_mean(
    points: &[&[f64]],
    point_weights: &[f64],
    quad: Quad,
    constrained: bool,
) -> Result<Vec<f64>> {
    let total: f64 = point_weights.iter().sum();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if distance(points[i], points[j], quad) >= std::f64::consts::PI - 1e-6 {
                return Err(Error::geometry(
                    "sphere mean needs all points inside an open hemisphere",
                ));
            }
        }
    }
    let dim = points[0].len();
    let mut mu = vec![0.0; dim];
    for (p, &w) in points.iter().zip(point_weights) {
        for (m, &x) in mu.iter_mut().zip(p.iter()) {
            *m += w * x / total;
        }
    }
    let nrm = quad.norm(&mu);
    if nrm < 1e-12 {
        return Err(Error::geometry(
            "extrinsic mean vanished; sphere mean start is undefined",
        ));
    }
    for m in mu.iter_mut() {
        *m /= nrm;
    }

    let mut converged = false;
    for _ in 0..MEAN_MAX_ITER {
        let mut tangent = vec![0.0; dim];
        for (p, &w) in points.iter().zip(point_weights) {
            let lg = log_map(&mu, p, quad)?;
            for (t, l) in tangent.iter_mut().zip(lg) {
                *t += w * l / total;
            }
        }
        let step = quad.norm(&tangent);
        mu = exp_map(&mu, &tangent, quad);
        if step < MEAN_STEP_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numeric(format!(
            "sphere mean did not converge within {MEAN_MAX_ITER} iterations"
        )));
    }
    if constrained {
        project_nonneg(&mu, quad)
    } else {
        Ok(mu)
    }
}

/// Projection onto the non-negative orthant of the sphere: clamp negative
/// coefficients to zero and renormalize. All-nonpositive input has no
/// projection target.
pub fn project_nonneg(g: &[f64], quad: Quad) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = g.iter().map(|&v| v.max(0.0)).collect();
    let nrm = quad.norm(&out);
    if nrm < 1e-12 {
        return Err(Error::geometry(
            "projection target is empty: no positive coefficient survives",
        ));
    }
    for v in out.iter_mut() {
        *v /= nrm;
    }
    Ok(out)
}

/// Square-root embedding of a density given on the quadrature grid.
///
/// The density must be non-negative with total quadrature mass within 1% of
/// one; it is renormalized exactly before taking the root.
pub fn embed_density(density: &[f64], quad: Quad) -> Result<Vec<f64>> {
    if density.iter().any(|&f| !f.is_finite() || f < 0.0) {
        return Err(Error::ingestion("density values must be finite and non-negative"));
    }
    let mass = match quad.0 {
        None => density.iter().sum::<f64>(),
        Some(w) => density.iter().zip(w).map(|(f, wi)| f * wi).sum::<f64>(),
    };
    if mass < 1e-12 {
        return Err(Error::ingestion("all-zero density cannot be embedded"));
    }
    if (mass - 1.0).abs() > 0.01 {
        return Err(Error::ingestion(format!(
            "density mass {mass:.6} deviates from 1 by more than 1%"
        )));
    }
    Ok(density.iter().map(|&f| (f / mass).sqrt()).collect())
}

/// Membership check: finite coefficients, unit weighted norm, and (in
/// constrained mode) no materially negative coefficient.
pub fn validate(g: &[f64], dim: usize, quad: Quad, constrained: bool, tol: f64) -> Result<()> {
    if g.len() != dim {
        return Err(Error::geometry(format!(
            "sphere point length {} does not match dimension {dim}",
            g.len()
        )));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::geometry("non-finite sphere coefficient"));
    }
    let nrm = quad.norm(g);
    let slack = tol.max(1e-10);
    if (nrm - 1.0).abs() > slack {
        return Err(Error::geometry(format!(
            "weighted norm {nrm} is off the unit sphere (slack {slack})"
        )));
    }
    if constrained {
        if let Some(bad) = g.iter().find(|&&v| v < -slack) {
            return Err(Error::geometry(format!(
                "negative coefficient {bad} in orthant-constrained mode"
            )));
        }
    }
    Ok(())
}

fn renormalize(g: &mut [f64], quad: Quad) {
    let nrm = quad.norm(g);
    if nrm > 1e-300 {
        for v in g.iter_mut() {
            *v /= nrm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

    const UNIT: Quad = Quad(None);

    fn e(i: usize, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    }

    #[test]
    fn distance_is_arccos() {
        let g = e(0, 3);
        let h = vec![0.5, (3.0f64).sqrt() / 2.0, 0.0];
        assert_abs_diff_eq!(distance(&g, &h, UNIT), FRAC_PI_3, epsilon = 1e-14);
    }

    #[test]
    fn rotation_carries_g1_to_g2_and_fixes_complement() {
        let g1 = e(0, 3);
        let g2 = e(1, 3);
        let spec = rotation_between(&g1, &g2, UNIT).unwrap().unwrap();
        assert_abs_diff_eq!(spec.angle, FRAC_PI_2, epsilon = 1e-15);
        let moved = rotate(&spec, spec.angle, &g1, UNIT);
        assert_abs_diff_eq!(distance(&moved, &g2, UNIT), 0.0, epsilon = 1e-12);
        let fixed = rotate(&spec, spec.angle, &e(2, 3), UNIT);
        assert_abs_diff_eq!(fixed[2], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fixed[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rotation_round_trip_is_identity() {
        let g1 = e(0, 4);
        let g2: Vec<f64> = vec![0.5, 0.5, 0.5, 0.5];
        let spec = rotation_between(&g1, &g2, UNIT).unwrap().unwrap();
        let x = vec![0.2, -0.4, 0.7, 0.5609];
        let there = rotate(&spec, 0.83, &x, UNIT);
        let back = rotate(&spec, -0.83, &there, UNIT);
        for (a, b) in back.iter().zip(&x) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn geodesic_midpoint_on_s2() {
        let mid = geodesic_point(&e(0, 3), &e(1, 3), 0.5, UNIT).unwrap();
        assert_abs_diff_eq!(mid[0], FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(mid[1], FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn geodesic_arc_length_is_proportional() {
        let g1 = e(0, 3);
        let g2 = vec![0.0, 0.6, 0.8];
        let theta = distance(&g1, &g2, UNIT);
        for t in [0.2, 0.5, 0.9] {
            let p = geodesic_point(&g1, &g2, t, UNIT).unwrap();
            assert_abs_diff_eq!(distance(&g1, &p, UNIT), t * theta, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_geodesic_returns_start() {
        let g = vec![0.6, 0.8, 0.0];
        let p = geodesic_point(&g, &g, 0.7, UNIT).unwrap();
        assert_eq!(p, g);
    }

    #[test]
    fn antipodal_pair_is_rejected() {
        let g = e(0, 3);
        let h = vec![-1.0, 0.0, 0.0];
        assert!(matches!(
            rotation_between(&g, &h, UNIT),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn ubiquity_identities() {
        let g1 = e(0, 3);
        let g2 = vec![0.0, 0.8, 0.6];
        let g3 = vec![0.36, 0.48, 0.8];
        let to_g2 = ubiquity(&g1, &g2, &g1, UNIT, false).unwrap();
        assert!(distance(&to_g2, &g2, UNIT) <= 1e-12);
        let unmoved = ubiquity(&g1, &g1, &g3, UNIT, false).unwrap();
        assert!(distance(&unmoved, &g3, UNIT) <= 1e-12);
    }

    #[test]
    fn exp_log_round_trip() {
        let p = e(0, 3);
        let q = vec![0.2, 0.5609, 0.8033];
        let qn = {
            let mut v = q;
            renormalize(&mut v, UNIT);
            v
        };
        let v = log_map(&p, &qn, UNIT).unwrap();
        assert_abs_diff_eq!(UNIT.norm(&v), distance(&p, &qn, UNIT), epsilon = 1e-14);
        let back = exp_map(&p, &v, UNIT);
        // Coordinate-wise comparison: arccos cannot resolve distances at
        // machine scale near zero.
        for (a, b) in back.iter().zip(&qn) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn mean_of_two_points_is_the_midpoint() {
        let g1 = e(0, 3);
        let g2 = e(1, 3);
        let mean = frechet_mean(&[&g1, &g2], &[1.0, 1.0], UNIT, false).unwrap();
        let mid = geodesic_point(&g1, &g2, 0.5, UNIT).unwrap();
        assert!(distance(&mean, &mid, UNIT) <= 1e-9);
    }

    #[test]
    fn mean_rejects_spread_beyond_hemisphere() {
        let g1 = e(0, 3);
        let g2 = vec![-1.0, 0.0, 0.0];
        assert!(frechet_mean(&[&g1, &g2], &[1.0, 1.0], UNIT, false).is_err());
    }

    #[test]
    fn weighted_mean_respects_quadrature() {
        // Weights 0.25 per cell: valid points have weighted norm 1.
        let w = vec![0.25; 4];
        let quad = Quad(Some(&w));
        let g1 = vec![2.0, 0.0, 0.0, 0.0];
        let g2 = vec![0.0, 2.0, 0.0, 0.0];
        let mean = frechet_mean(&[&g1, &g2], &[1.0, 1.0], quad, false).unwrap();
        assert_abs_diff_eq!(quad.norm(&mean), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mean[0], mean[1], epsilon = 1e-9);
    }

    #[test]
    fn projection_clamps_and_renormalizes() {
        let g = vec![0.6, -0.8, 0.0];
        let p = project_nonneg(&g, UNIT).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        assert!(project_nonneg(&[-0.6, -0.8, 0.0], UNIT).is_err());
    }

    #[test]
    fn embed_density_single_cell() {
        let w = vec![0.25; 4];
        let quad = Quad(Some(&w));
        let g = embed_density(&[0.0, 4.0, 0.0, 0.0], quad).unwrap();
        assert_eq!(g, vec![0.0, 2.0, 0.0, 0.0]);
        assert_abs_diff_eq!(quad.norm(&g), 1.0, epsilon = 1e-15);
        assert!(embed_density(&[0.0, 0.0, 0.0, 0.0], quad).is_err());
        assert!(embed_density(&[0.0, 8.0, 0.0, 0.0], quad).is_err());
    }

    proptest! {
        #[test]
        fn rotations_preserve_weighted_norm(
            raw1 in prop::collection::vec(-1.0f64..1.0, 5),
            raw2 in prop::collection::vec(-1.0f64..1.0, 5),
            rawx in prop::collection::vec(-1.0f64..1.0, 5),
            theta in -3.0f64..3.0,
        ) {
            let w = vec![0.3, 0.1, 0.9, 0.5, 0.2];
            let quad = Quad(Some(&w));
            let mut g1 = raw1; let mut g2 = raw2; let x = rawx;
            prop_assume!(quad.norm(&g1) > 1e-3 && quad.norm(&g2) > 1e-3);
            renormalize(&mut g1, quad);
            renormalize(&mut g2, quad);
            prop_assume!(quad.dot(&g1, &g2) > -0.9);
            if let Some(spec) = rotation_between(&g1, &g2, quad).unwrap() {
                let y = rotate(&spec, theta, &x, quad);
                prop_assert!((quad.norm(&y) - quad.norm(&x)).abs() <= 1e-9);
            }
        }
    }
}
