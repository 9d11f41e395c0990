//! Thin SVD by one-sided Jacobi rotations.
//!
//! Columns are orthogonalized pairwise until every pair is orthogonal to
//! working precision, which keeps small singular values accurate to high
//! relative precision and copes with exactly rank-deficient inputs.

const MAX_SWEEPS: usize = 80;

/// `a = u diag(sigma) v'`, sigma descending. `u[i][k]`, `v[j][k]`.
#[derive(Debug, Clone)]
pub(crate) struct Svd {
    pub sigma: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

/// Thin SVD of the row-major `rows x cols` matrix `a`; `min(rows, cols)`
/// components. `None` if the rotations fail to converge.
pub(crate) fn svd(a: &[Vec<f64>]) -> Option<Svd> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m < n {
        let t: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
        let s = svd(&t)?;
        return Some(Svd { sigma: s.sigma, u: s.v, v: s.u });
    }
    // column-major working copy: w[j] is column j
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| f64::from(u8::from(j == k))).collect()).collect();

    // pairs whose inner product is below this are numerically null
    let fro2: f64 = w.iter().flatten().map(|x| x * x).sum();
    let floor = f64::EPSILON * f64::EPSILON * fro2;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = w[p].iter().zip(&w[q]).fold((0.0, 0.0, 0.0), |(a, b, g), (x, y)| {
                    (a + x * x, b + y * y, g + x * y)
                });
                if gamma.abs() <= floor || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }

    let norms: Vec<f64> = w.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let u = (0..m)
        .map(|i| order.iter().map(|&k| if norms[k] > 0.0 { w[k][i] / norms[k] } else { 0.0 }).collect())
        .collect();
    let v = (0..n).map(|j| order.iter().map(|&k| v[k][j]).collect()).collect();
    Some(Svd { sigma, u, v })
}

// Rotates columns p and q of a column-major matrix.
fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}
