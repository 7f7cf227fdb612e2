//! SPD backend: symmetric positive-definite matrices through their Cholesky
//! factors, with the log-diagonal chart.
//!
//! A point's payload is the lower-triangular factor L in row-major order
//! (length m(m+1)/2, diagonal strictly positive). The chart keeps the strict
//! lower triangle as is and logs the diagonal, which flattens the geometry
//! completely: distance, geodesics, transfers, and means are plain vector
//! arithmetic in chart coordinates.

use crate::error::{Error, Result};

/// Payload length for size-m factors.
#[inline]
pub fn payload_len(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Row-major lower-triangular index of (i, j), j <= i.
#[inline]
fn tri_idx(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

/// Chart coordinates: strict lower triangle unchanged, diagonal logged.
pub fn chart(payload: &[f64], m: usize) -> Vec<f64> {
    let mut out = payload.to_vec();
    for i in 0..m {
        let d = tri_idx(i, i);
        out[d] = out[d].ln();
    }
    out
}

/// Inverse chart: exponentiate the diagonal entries back.
pub fn unchart(coords: &[f64], m: usize) -> Vec<f64> {
    let mut out = coords.to_vec();
    for i in 0..m {
        let d = tri_idx(i, i);
        out[d] = out[d].exp();
    }
    out
}

pub fn distance(a: &[f64], b: &[f64], m: usize) -> f64 {
    let ca = chart(a, m);
    let cb = chart(b, m);
    ca.iter()
        .zip(&cb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn geodesic_point(a: &[f64], b: &[f64], t: f64, m: usize) -> Vec<f64> {
    let ca = chart(a, m);
    let cb = chart(b, m);
    let mixed: Vec<f64> = ca.iter().zip(&cb).map(|(x, y)| x + t * (y - x)).collect();
    unchart(&mixed, m)
}

/// Transfer of `w3` along (`w1`, `w2`): chart translation c3 + (c2 - c1).
pub fn ubiquity(w1: &[f64], w2: &[f64], w3: &[f64], m: usize) -> Vec<f64> {
    let c1 = chart(w1, m);
    let c2 = chart(w2, m);
    let c3 = chart(w3, m);
    let moved: Vec<f64> = c1
        .iter()
        .zip(&c2)
        .zip(&c3)
        .map(|((a, b), c)| c + (b - a))
        .collect();
    unchart(&moved, m)
}

pub fn frechet_mean(points: &[&[f64]], weights: &[f64], m: usize) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut acc = vec![0.0; points[0].len()];
    for (p, &w) in points.iter().zip(weights) {
        let c = chart(p, m);
        for (a, v) in acc.iter_mut().zip(c) {
            *a += w * v / total;
        }
    }
    unchart(&acc, m)
}

/// Cholesky factor of a dense symmetric positive-definite matrix
/// (row-major, length m*m), as a factor payload.
pub fn cholesky_factor(dense: &[f64], m: usize) -> Result<Vec<f64>> {
    if dense.len() != m * m {
        return Err(Error::ingestion(format!(
            "matrix payload length {} is not {m}x{m}",
            dense.len()
        )));
    }
    if dense.iter().any(|v| !v.is_finite()) {
        return Err(Error::ingestion("non-finite matrix entry"));
    }
    let scale = dense.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for i in 0..m {
        for j in (i + 1)..m {
            if (dense[i * m + j] - dense[j * m + i]).abs() > 1e-8 * scale {
                return Err(Error::ingestion(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut l = vec![0.0; payload_len(m)];
    for i in 0..m {
        for j in 0..=i {
            // Symmetrized read guards against tiny asymmetry passed above.
            let aij = 0.5 * (dense[i * m + j] + dense[j * m + i]);
            let mut s = aij;
            for k in 0..j {
                s -= l[tri_idx(i, k)] * l[tri_idx(j, k)];
            }
            if i == j {
                if s <= 1e-300 * scale {
                    return Err(Error::ingestion(format!(
                        "matrix is not positive definite (pivot {i} is {s:.3e})"
                    )));
                }
                l[tri_idx(i, i)] = s.sqrt();
            } else {
                l[tri_idx(i, j)] = s / l[tri_idx(j, j)];
            }
        }
    }
    Ok(l)
}

/// Reconstruct the dense SPD matrix L L^T (row-major, length m*m).
pub fn to_matrix(payload: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0.0;
            for k in 0..=i.min(j) {
                acc += payload[tri_idx(i, k)] * payload[tri_idx(j, k)];
            }
            out[i * m + j] = acc;
        }
    }
    out
}

/// Membership check: length, finiteness, strictly positive diagonal.
pub fn validate(payload: &[f64], m: usize, _tol: f64) -> Result<()> {
    if payload.len() != payload_len(m) {
        return Err(Error::geometry(format!(
            "factor payload length {} does not match size {m}",
            payload.len()
        )));
    }
    if payload.iter().any(|v| !v.is_finite()) {
        return Err(Error::geometry("non-finite factor entry"));
    }
    for i in 0..m {
        let d = payload[tri_idx(i, i)];
        if d <= 0.0 {
            return Err(Error::geometry(format!(
                "factor diagonal entry {i} is {d}; must be positive"
            )));
        }
    }
    Ok(())
}
