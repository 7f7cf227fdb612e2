//! Wasserstein backend: 1-D distributions on a compact support, represented
//! by quantile values sampled at midpoint levels u_k = (2k-1)/(2M).
//!
//! In this representation the metric, geodesics, means, and transfer maps are
//! all quantile-space arithmetic:
//! distance is the root mean square of quantile differences (midpoint rule for
//! the L2 norm of quantile functions), the geodesic between two distributions
//! interpolates quantiles linearly, and the transport map from `a` to `b` is
//! the composition of `b`'s quantile function with `a`'s CDF.
//!
//! A point's payload is its quantile vector; the support interval and grid
//! size live in the space descriptor. Quantile vectors are non-decreasing and
//! clamped to the support; every operation that can dent monotonicity repairs
//! its output with pool-adjacent-violators before returning.

use crate::error::{Error, Result};
use crate::isotonic::enforce_monotone;

/// Midpoint levels u_k = (2k-1)/(2M), k = 1..M.
pub fn midpoint_levels(m: usize) -> Vec<f64> {
    (1..=m).map(|k| (2 * k - 1) as f64 / (2 * m) as f64).collect()
}

/// Level of the 0-based quantile index `j`.
#[inline]
fn level(j: usize, m: usize) -> f64 {
    (2 * j + 1) as f64 / (2 * m) as f64
}

/// Empirical quantiles of `samples` at the M midpoint levels.
///
/// Sorted sample `i` (0-based) sits at level (i + 0.5)/n; quantiles between
/// adjacent sample levels interpolate linearly and the ends extend as
/// constants. All samples must lie within the support.
pub fn from_samples(samples: &[f64], m: usize, support: (f64, f64)) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::ingestion("empty sample set for a quantile grid"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::ingestion("non-finite sample value"));
    }
    let (s1, s2) = support;
    if let Some(bad) = samples.iter().find(|&&x| x < s1 || x > s2) {
        return Err(Error::ingestion(format!(
            "sample {bad} outside declared support [{s1}, {s2}]"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let out = midpoint_levels(m)
        .into_iter()
        .map(|u| {
            // Index position of level u under the (i + 0.5)/n convention.
            let t = u * n as f64 - 0.5;
            if t <= 0.0 {
                sorted[0]
            } else if t >= (n - 1) as f64 {
                sorted[n - 1]
            } else {
                let j = t.floor() as usize;
                let frac = t - j as f64;
                sorted[j] + frac * (sorted[j + 1] - sorted[j])
            }
        })
        .collect();
    Ok(out)
}

/// Quantile function: piecewise-linear through (u_k, values[k]), constant
/// beyond the first and last levels.
pub fn quantile_eval(values: &[f64], u: f64) -> f64 {
    let m = values.len();
    let t = u * m as f64 - 0.5;
    if t <= 0.0 {
        return values[0];
    }
    if t >= (m - 1) as f64 {
        return values[m - 1];
    }
    let j = t.floor() as usize;
    let frac = t - j as f64;
    values[j] + frac * (values[j + 1] - values[j])
}

/// CDF as the generalized inverse of the quantile function, with flat
/// regions resolved to their left endpoint, so quantile_eval(cdf_eval(x)) = x
/// for x in the quantile range.
pub fn cdf_eval(values: &[f64], x: f64) -> f64 {
    let m = values.len();
    if x <= values[0] {
        return 0.0;
    }
    if x > values[m - 1] {
        return 1.0;
    }
    // First index whose value reaches x; predecessors are strictly below x.
    let k = values.partition_point(|&v| v < x);
    let prev = values[k - 1];
    let cur = values[k];
    level(k - 1, m) + (1.0 / m as f64) * (x - prev) / (cur - prev)
}

/// Root-mean-square quantile difference (midpoint rule in the level domain).
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len();
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum / m as f64).sqrt()
}

/// A non-decreasing map of the support into itself, sampled on the uniform
/// grid x_j = s1 + j (s2-s1)/(L-1) and interpolated linearly between nodes.
#[derive(Clone, Debug)]
pub struct MonotoneMap {
    pub values: Vec<f64>,
    pub support: (f64, f64),
}

impl MonotoneMap {
    /// Value at `x`, clamped to the grid range outside the support.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let (s1, s2) = self.support;
        let t = (x - s1) / (s2 - s1) * (n - 1) as f64;
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= (n - 1) as f64 {
            return self.values[n - 1];
        }
        let j = t.floor() as usize;
        let frac = t - j as f64;
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }

    /// Pointwise affine mix `(1-alpha) self + alpha other` on the shared grid.
    ///
    /// Because a transport map is linear in the target's quantile values,
    /// mixing the maps toward two targets equals the map toward the targets'
    /// geodesic point, exactly, node by node.
    pub fn affine_mix(&self, other: &MonotoneMap, alpha: f64) -> MonotoneMap {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x + alpha * (y - x))
            .collect();
        MonotoneMap { values, support: self.support }
    }
}

/// Optimal transport map from `a` to `b`: Q_b composed with F_a, sampled on
/// the uniform support grid with as many nodes as quantile levels.
pub fn transport_map(a: &[f64], b: &[f64], support: (f64, f64)) -> MonotoneMap {
    let m = a.len();
    let (s1, s2) = support;
    let h = (s2 - s1) / (m - 1) as f64;
    let values = (0..m)
        .map(|j| {
            let x = s1 + h * j as f64;
            quantile_eval(b, cdf_eval(a, x))
        })
        .collect();
    MonotoneMap { values, support }
}

/// Pushforward of `c` under `map`: evaluate the map at c's quantiles, then
/// repair order and clamp to the support.
pub fn apply_pushforward(map: &MonotoneMap, c: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = c.iter().map(|&x| map.eval(x)).collect();
    enforce_monotone(&mut out);
    clamp_to_support(&mut out, map.support);
    out
}

/// Geodesic point at parameter `t`: quantile-linear interpolation. Values of
/// `t` outside [0, 1] extrapolate and are repaired/clamped.
pub fn mccann(a: &[f64], b: &[f64], t: f64, support: (f64, f64)) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
    if !(0.0..=1.0).contains(&t) {
        enforce_monotone(&mut out);
        clamp_to_support(&mut out, support);
    }
    out
}

/// Transfer of `w3` along the pair (`w1`, `w2`): pushforward of `w3` under
/// the transport map from `w1` to `w2`.
pub fn ubiquity(w1: &[f64], w2: &[f64], w3: &[f64], support: (f64, f64)) -> Vec<f64> {
    apply_pushforward(&transport_map(w1, w2, support), w3)
}

/// Weighted mean: pointwise weighted average of quantile vectors.
pub fn frechet_mean(points: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let m = points[0].len();
    let total: f64 = weights.iter().sum();
    let mut out = vec![0.0; m];
    for (p, &w) in points.iter().zip(weights) {
        for (o, &v) in out.iter_mut().zip(p.iter()) {
            *o += w * v;
        }
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    out
}

pub fn clamp_to_support(values: &mut [f64], support: (f64, f64)) {
    let (s1, s2) = support;
    for v in values.iter_mut() {
        *v = v.clamp(s1, s2);
    }
}

/// Membership check for a quantile payload: finite, non-decreasing (up to a
/// slack proportional to the support width), inside the support.
pub fn validate(values: &[f64], m: usize, support: (f64, f64), tol: f64) -> Result<()> {
    if values.len() != m {
        return Err(Error::geometry(format!(
            "quantile vector length {} does not match grid size {m}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::geometry("non-finite quantile value"));
    }
    let (s1, s2) = support;
    let slack = tol.max(1e-12) * (s2 - s1).abs().max(1.0);
    for w in values.windows(2) {
        if w[1] < w[0] - slack {
            return Err(Error::geometry(format!(
                "quantile vector decreases by {} (beyond slack {slack})",
                w[0] - w[1]
            )));
        }
    }
    if values[0] < s1 - slack || values[m - 1] > s2 + slack {
        return Err(Error::geometry(format!(
            "quantile values [{}, {}] escape support [{s1}, {s2}]",
            values[0],
            values[m - 1]
        )));
    }
    Ok(())
}

/// Equal-mass histogram bins recovered from a quantile vector, for density
/// emission. Each of the M bins carries mass 1/M between midpoints of
/// adjacent quantiles (end bins extrapolate half a step, clamped to the
/// support); zero-width runs are merged so the total integral is exactly 1.
pub fn density_bins(values: &[f64], support: (f64, f64)) -> Vec<(f64, f64, f64)> {
    let m = values.len();
    let (s1, s2) = support;
    let mass = 1.0 / m as f64;
    let mut edges = Vec::with_capacity(m + 1);
    edges.push((values[0] - 0.5 * (values[1] - values[0])).max(s1));
    for j in 1..m {
        edges.push(0.5 * (values[j - 1] + values[j]));
    }
    edges.push((values[m - 1] + 0.5 * (values[m - 1] - values[m - 2])).min(s2));

    let min_width = 1e-12 * (s2 - s1).abs().max(1.0);
    let mut bins: Vec<(f64, f64, f64)> = Vec::with_capacity(m);
    let mut pending_mass = 0.0;
    let mut left = edges[0];
    for j in 0..m {
        pending_mass += mass;
        let right = edges[j + 1];
        if right - left >= min_width {
            bins.push((left, right, pending_mass / (right - left)));
            pending_mass = 0.0;
            left = right;
        }
    }
    if pending_mass > 0.0 {
        // Trailing zero-width run: attach to the last bin, keeping mass.
        if let Some(last) = bins.last_mut() {
            let width = last.1 - last.0;
            last.2 += pending_mass / width;
        } else {
            // Fully degenerate vector (point mass): one thin bin at the atom.
            let half = min_width.max(f64::EPSILON);
            let lo = (values[0] - half).max(s1);
            let hi = (values[0] + half).min(s2);
            bins.push((lo, hi, 1.0 / (hi - lo)));
        }
    }
    bins
}
