//! Euclidean backend: the reference implementation of the space contract.
//!
//! Everything is exact linear algebra on flat vectors, which makes this the
//! baseline other backends are tested against.

/// L2 distance.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Straight-line interpolation `a + t (b - a)`; `t` may lie outside [0, 1].
pub fn geodesic_point(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Translation transfer: `w3 + (w2 - w1)`.
pub fn ubiquity(w1: &[f64], w2: &[f64], w3: &[f64]) -> Vec<f64> {
    w1.iter()
        .zip(w2)
        .zip(w3)
        .map(|((a, b), c)| c + (b - a))
        .collect()
}

/// Weighted arithmetic mean. `weights` must already be validated (positive sum).
pub fn frechet_mean(points: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let dim = points[0].len();
    let total: f64 = weights.iter().sum();
    let mut out = vec![0.0; dim];
    for (p, &w) in points.iter().zip(weights) {
        for (o, &x) in out.iter_mut().zip(p.iter()) {
            *o += w * x;
        }
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distance_is_l2() {
        assert_abs_diff_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn geodesic_midpoint() {
        let mid = geodesic_point(&[0.0, 2.0], &[2.0, 0.0], 0.5);
        assert_eq!(mid, vec![1.0, 1.0]);
    }

    #[test]
    fn ubiquity_is_translation() {
        let w4 = ubiquity(&[1.0, 1.0], &[2.0, 3.0], &[0.0, -1.0]);
        assert_eq!(w4, vec![1.0, 1.0]);
    }

    #[test]
    fn mean_respects_weights() {
        let a = [0.0, 0.0];
        let b = [4.0, 8.0];
        let m = frechet_mean(&[&a, &b], &[3.0, 1.0]);
        assert_abs_diff_eq!(m[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1], 2.0, epsilon = 1e-15);
    }
}
