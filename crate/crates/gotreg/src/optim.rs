//! Derivative-free minimization over a symmetric box: Nelder-Mead with
//! iterates reflected into the box, plus a deterministic multi-start driver
//! seeded from a coarse grid.
//!
//! The regression losses are piecewise-smooth (projection and clamping
//! boundaries), so a simplex method is used instead of gradients. Runs are
//! pure functions of their inputs; the multi-start driver reduces by indexed
//! minimum so parallel and sequential execution give bitwise-identical
//! results.

use rayon::prelude::*;

/// Stopping and step-size settings for one simplex run.
#[derive(Clone, Copy, Debug)]
pub struct NelderMeadConfig {
    /// Converged when both the function spread and the simplex diameter fall
    /// below this.
    pub tolerance: f64,
    /// Iteration cap; hitting it returns best-so-far with `converged: false`.
    pub max_iterations: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            tolerance: 1e-6,
            max_iterations: 500,
            initial_step: 0.25,
        }
    }
}

/// Result of a minimization run.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Reflect a coordinate into [lo, hi] (triangle-wave folding), so simplex
/// iterates may roam freely while the objective only ever sees box points.
pub fn fold_into_box(x: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if width <= 0.0 {
        return lo;
    }
    if x >= lo && x <= hi {
        return x;
    }
    let mut t = (x - lo).rem_euclid(2.0 * width);
    if t > width {
        t = 2.0 * width - t;
    }
    lo + t
}

fn fold_point(x: &[f64], bound: f64) -> Vec<f64> {
    x.iter().map(|&c| fold_into_box(c, -bound, bound)).collect()
}

/// Nelder-Mead over the box [-bound, bound]^dim with standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 0.5, 0.5).
///
/// The returned point is folded into the box.
pub fn nelder_mead_box<F>(
    f: &F,
    start: &[f64],
    bound: f64,
    config: &NelderMeadConfig,
) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| -> f64 {
        evaluations += 1;
        f(&fold_point(x, bound))
    };

    // Initial simplex: the start plus one step along each axis.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += config.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut converged = false;
    for _ in 0..config.max_iterations {
        // Order the simplex by value (stable: equal values keep their order).
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        let spread = values[dim] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= config.tolerance && diameter <= config.tolerance {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let worst = simplex[dim].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflected = eval(&reflected);

        if f_reflected < values[0] {
            // Try to expand further along the same direction.
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
        } else if f_reflected < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
        } else {
            // Contract toward the better of worst/reflected.
            let (anchor, f_anchor) = if f_reflected < values[dim] {
                (&reflected, f_reflected)
            } else {
                (&worst, values[dim])
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(anchor)
                .map(|(c, a)| c + 0.5 * (a - c))
                .collect();
            let f_contracted = eval(&contracted);
            if f_contracted < f_anchor {
                simplex[dim] = contracted;
                values[dim] = f_contracted;
            } else {
                // Shrink everything toward the best vertex.
                for i in 1..=dim {
                    let best = simplex[0].clone();
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    values[i] = eval(&simplex[i].clone());
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    Minimum {
        point: fold_point(&simplex[best], bound),
        value: values[best],
        converged,
        evaluations,
    }
}

/// Deterministic start list: the cross product of `grid` over `dim`
/// coordinates, ranked by objective value (ties by enumeration order) and
/// capped at `cap` seeds; warm starts are prepended in the order given.
/// When the cross product would exceed `MAX_GRID_POINTS`, axis-wise starts
/// (one grid value per coordinate, others zero) replace it.
pub fn seed_starts<F>(
    f: &F,
    warms: &[Vec<f64>],
    grid: &[f64],
    dim: usize,
    cap: usize,
) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const MAX_GRID_POINTS: usize = 4096;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if !grid.is_empty() {
        let full_size = grid.len().checked_pow(dim as u32).unwrap_or(usize::MAX);
        if full_size <= MAX_GRID_POINTS {
            let mut point = vec![0usize; dim];
            loop {
                candidates.push(point.iter().map(|&i| grid[i]).collect());
                // Odometer increment over grid indices.
                let mut k = 0;
                loop {
                    if k == dim {
                        break;
                    }
                    point[k] += 1;
                    if point[k] < grid.len() {
                        break;
                    }
                    point[k] = 0;
                    k += 1;
                }
                if k == dim {
                    break;
                }
            }
        } else {
            candidates.push(vec![0.0; dim]);
            for i in 0..dim {
                for &g in grid {
                    let mut v = vec![0.0; dim];
                    v[i] = g;
                    candidates.push(v);
                }
            }
        }
    }
    if candidates.is_empty() {
        candidates.push(vec![0.0; dim]);
    }

    let mut scored: Vec<(usize, f64)> = candidates
        .par_iter()
        .map(|c| f(c.as_slice()))
        .collect::<Vec<f64>>()
        .into_iter()
        .enumerate()
        .collect();
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(cap);

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(scored.len() + warms.len());
    for w in warms {
        starts.push(w.clone());
    }
    for (i, _) in scored {
        starts.push(candidates[i].clone());
    }
    starts
}

/// Run Nelder-Mead from every start and keep the first-found minimum
/// (strictly smaller value replaces; ties keep the earlier start). Runs are
/// independent, so they execute in parallel; the reduction walks results in
/// start order to stay identical to a sequential pass.
pub fn multi_start_box<F>(
    f: &F,
    starts: &[Vec<f64>],
    bound: f64,
    config: &NelderMeadConfig,
) -> Minimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(!starts.is_empty(), "at least one start required");
    let runs: Vec<Minimum> = starts
        .par_iter()
        .map(|s| nelder_mead_box(f, s, bound, config))
        .collect();
    let mut best = runs[0].clone();
    let mut evaluations = 0usize;
    for run in &runs {
        evaluations += run.evaluations;
        if run.value < best.value {
            best = run.clone();
        }
    }
    best.evaluations = evaluations;
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn folding_reflects_into_the_box() {
        assert_abs_diff_eq!(fold_into_box(0.5, -2.0, 2.0), 0.5);
        assert_abs_diff_eq!(fold_into_box(2.5, -2.0, 2.0), 1.5);
        assert_abs_diff_eq!(fold_into_box(-2.5, -2.0, 2.0), -1.5);
        // One full period (8) past -1.5.
        assert_abs_diff_eq!(fold_into_box(6.5, -2.0, 2.0), -1.5);
        // Reflection segment: 2 -> 2, 6 -> -2.
        assert_abs_diff_eq!(fold_into_box(5.0, -2.0, 2.0), -1.0);
        assert_abs_diff_eq!(fold_into_box(2.0, -2.0, 2.0), 2.0);
    }

    #[test]
    fn quadratic_minimum_is_found() {
        let f = |x: &[f64]| (x[0] - 1.3).powi(2);
        let m = nelder_mead_box(&f, &[0.0], 2.0, &NelderMeadConfig::default());
        assert!(m.converged);
        assert_abs_diff_eq!(m.point[0], 1.3, epsilon = 1e-4);
    }

    #[test]
    fn coupled_quadratic_in_two_dimensions() {
        // Minimum of (x-1)^2 + (y+0.5)^2 + 0.3(x-1)(y+0.5) at (1, -0.5).
        let f = |v: &[f64]| {
            let a = v[0] - 1.0;
            let b = v[1] + 0.5;
            a * a + b * b + 0.3 * a * b
        };
        let cfg = NelderMeadConfig { tolerance: 1e-10, ..Default::default() };
        let m = nelder_mead_box(&f, &[0.0, 0.0], 2.0, &cfg);
        assert!(m.converged);
        assert_abs_diff_eq!(m.point[0], 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m.point[1], -0.5, epsilon = 1e-4);
    }

    #[test]
    fn boundary_minimum_lands_on_the_box_edge() {
        // Unconstrained minimum at 5, box [-2, 2]: constrained optimum is 2.
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let m = nelder_mead_box(&f, &[0.0], 2.0, &NelderMeadConfig::default());
        assert!(m.point[0] <= 2.0 + 1e-12);
        assert_abs_diff_eq!(m.point[0], 2.0, epsilon = 1e-3);
    }

    #[test]
    fn multi_start_escapes_local_minima() {
        // Two wells: global at -1 (value 0), local at +1 (value 0.5).
        let f = |x: &[f64]| {
            let left = (x[0] + 1.0).powi(2);
            let right = (x[0] - 1.0).powi(2) + 0.5;
            left.min(right)
        };
        let starts = seed_starts(&f, &[], &[-1.5, 0.0, 0.75, 1.5], 1, 64);
        let m = multi_start_box(&f, &starts, 2.0, &NelderMeadConfig::default());
        assert_abs_diff_eq!(m.point[0], -1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m.value, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn warm_start_is_used_first() {
        let f = |x: &[f64]| (x[0] - 0.42).powi(2);
        let starts = seed_starts(&f, &[vec![0.4]], &[-1.5, 0.0, 1.5], 1, 64);
        assert_eq!(starts[0], vec![0.4]);
        // Grid point closest in value leads the rest.
        assert_eq!(starts[1], vec![0.0]);
    }

    #[test]
    fn seed_cap_limits_start_count() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let starts = seed_starts(&f, &[], &[-1.0, 0.0, 1.0], 3, 5);
        assert_eq!(starts.len(), 5);
        // Lowest-loss grid point is the origin.
        assert_eq!(starts[0], vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn oversized_cross_product_falls_back_to_axis_starts() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        // 5^8 = 390625 > 4096 triggers the axis-wise fallback:
        // 1 origin + 8 * 5 axis points.
        let starts = seed_starts(&f, &[], &[-1.5, -0.75, 0.0, 0.75, 1.5], 8, 64);
        assert_eq!(starts.len(), 41);
    }

    #[test]
    fn repeated_runs_are_bitwise_identical() {
        let f = |v: &[f64]| {
            let a = v[0] - 0.3;
            let b = v[1] + 0.9;
            (a * a - 1.0).powi(2) + b * b
        };
        let starts = seed_starts(&f, &[], &[-1.5, -0.75, 0.0, 0.75, 1.5], 2, 64);
        let m1 = multi_start_box(&f, &starts, 2.0, &NelderMeadConfig::default());
        let m2 = multi_start_box(&f, &starts, 2.0, &NelderMeadConfig::default());
        assert_eq!(m1.point, m2.point);
        assert_eq!(m1.value.to_bits(), m2.value.to_bits());
    }
}
