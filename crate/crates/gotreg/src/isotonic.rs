//! Isotonic repair of quantile vectors.
//!
//! Compositions of discretized monotone maps can leave tiny order violations
//! in a quantile vector; pool-adjacent-violators restores the nearest
//! non-decreasing vector in least squares (uniform weights).

/// Replaces `values` in place with its closest non-decreasing vector in L2.
///
/// Inputs that are already non-decreasing are left bitwise unchanged.
pub fn enforce_monotone(values: &mut [f64]) {
    if values.windows(2).all(|w| w[0] <= w[1]) {
        return;
    }
    // Blocks of pooled entries: (sum, count). Adjacent blocks are merged while
    // their means violate the order constraint.
    let mut sums: Vec<f64> = Vec::with_capacity(values.len());
    let mut counts: Vec<usize> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        let mut sum = v;
        let mut count = 1usize;
        while let (Some(&psum), Some(&pcount)) = (sums.last(), counts.last()) {
            if psum / pcount as f64 <= sum / count as f64 {
                break;
            }
            sum += psum;
            count += pcount;
            sums.pop();
            counts.pop();
        }
        sums.push(sum);
        counts.push(count);
    }
    let mut idx = 0;
    for (sum, count) in sums.into_iter().zip(counts) {
        let mean = sum / count as f64;
        for _ in 0..count {
            values[idx] = mean;
            idx += 1;
        }
    }
}

/// Convenience wrapper returning a repaired copy.
pub fn enforce_monotone_copy(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    enforce_monotone(&mut out);
    out
}
