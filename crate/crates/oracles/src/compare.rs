/// Largest absolute difference between two coordinate tables after flipping
/// each axis of `b` to best match `a`. Tables are points x axes.
pub fn max_diff_up_to_sign(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let k = a.first().map_or(0, Vec::len);
    if a.iter().chain(b).any(|row| row.len() != k) {
        return f64::INFINITY;
    }
    (0..k)
        .map(|ax| {
            let same = a.iter().zip(b).map(|(x, y)| (x[ax] - y[ax]).abs()).fold(0.0, f64::max);
            let flip = a.iter().zip(b).map(|(x, y)| (x[ax] + y[ax]).abs()).fold(0.0, f64::max);
            same.min(flip)
        })
        .fold(0.0, f64::max)
}

/// Largest absolute elementwise difference; infinite on shape mismatch.
pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}
