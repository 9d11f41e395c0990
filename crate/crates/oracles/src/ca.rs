use crate::eigen::jacobi_eigen;

/// Correspondence analysis of a dense table, computed from the eigenvectors
/// of the column and row cross-products of standardized residuals.
///
/// Only axes with eigenvalue above `1e-13` are kept. Coordinates carry an
/// arbitrary sign per axis.
#[derive(Debug, Clone)]
pub struct BruteCa {
    pub eigenvalues: Vec<f64>,
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
    pub row_principal: Vec<Vec<f64>>,
    pub col_principal: Vec<Vec<f64>>,
    pub row_ctr: Vec<Vec<f64>>,
    pub col_ctr: Vec<Vec<f64>>,
    pub row_cos2: Vec<Vec<f64>>,
    pub col_cos2: Vec<Vec<f64>>,
    /// Pearson chi-squared statistic divided by the grand total.
    pub chi2_over_n: f64,
}

impl BruteCa {
    pub fn fit(counts: &[Vec<u32>]) -> BruteCa {
        let (nr, nc) = (counts.len(), counts[0].len());
        let n: f64 = counts.iter().flatten().map(|&x| f64::from(x)).sum();
        let row_tot: Vec<f64> = counts.iter().map(|r| r.iter().map(|&x| f64::from(x)).sum()).collect();
        let col_tot: Vec<f64> = (0..nc).map(|j| counts.iter().map(|r| f64::from(r[j])).sum()).collect();
        let r: Vec<f64> = row_tot.iter().map(|t| t / n).collect();
        let c: Vec<f64> = col_tot.iter().map(|t| t / n).collect();

        let mut chi2 = 0.0;
        let mut s = vec![vec![0.0; nc]; nr];
        for i in 0..nr {
            for j in 0..nc {
                let e = row_tot[i] * col_tot[j] / n;
                chi2 += (f64::from(counts[i][j]) - e).powi(2) / e;
                s[i][j] = (f64::from(counts[i][j]) / n - r[i] * c[j]) / (r[i] * c[j]).sqrt();
            }
        }
        let cross: Vec<Vec<f64>> = (0..nc)
            .map(|a| (0..nc).map(|b| (0..nr).map(|i| s[i][a] * s[i][b]).sum()).collect())
            .collect();
        let (vals, vecs) = jacobi_eigen(&cross);
        let keep: Vec<usize> = (0..nc).filter(|&k| vals[k] > 1e-13).collect();
        let eigenvalues: Vec<f64> = keep.iter().map(|&k| vals[k]).collect();

        let col_principal: Vec<Vec<f64>> = (0..nc)
            .map(|j| keep.iter().map(|&k| vecs[j][k] * vals[k].sqrt() / c[j].sqrt()).collect())
            .collect();
        // rows from their own eigenproblem; going through the transition
        // formula would divide column errors by sqrt(lambda) on small axes
        let row_cross: Vec<Vec<f64>> = (0..nr)
            .map(|a| (0..nr).map(|b| (0..nc).map(|j| s[a][j] * s[b][j]).sum()).collect())
            .collect();
        let (row_vals, row_vecs) = jacobi_eigen(&row_cross);
        let row_principal: Vec<Vec<f64>> = (0..nr)
            .map(|i| (0..keep.len()).map(|k| row_vecs[i][k] * row_vals[k].sqrt() / r[i].sqrt()).collect())
            .collect();

        let ctr = |coords: &[Vec<f64>], m: &[f64]| -> Vec<Vec<f64>> {
            coords
                .iter()
                .zip(m)
                .map(|(x, mi)| x.iter().zip(&eigenvalues).map(|(v, l)| 100.0 * mi * v * v / l).collect())
                .collect()
        };
        let row_d2: Vec<f64> = (0..nr)
            .map(|i| (0..nc).map(|j| (f64::from(counts[i][j]) / row_tot[i] - c[j]).powi(2) / c[j]).sum())
            .collect();
        let col_d2: Vec<f64> = (0..nc)
            .map(|j| (0..nr).map(|i| (f64::from(counts[i][j]) / col_tot[j] - r[i]).powi(2) / r[i]).sum())
            .collect();
        let cos2 = |coords: &[Vec<f64>], d2: &[f64]| -> Vec<Vec<f64>> {
            coords.iter().zip(d2).map(|(x, d)| x.iter().map(|v| v * v / d).collect()).collect()
        };
        BruteCa {
            row_ctr: ctr(&row_principal, &r),
            col_ctr: ctr(&col_principal, &c),
            row_cos2: cos2(&row_principal, &row_d2),
            col_cos2: cos2(&col_principal, &col_d2),
            eigenvalues,
            row_masses: r,
            col_masses: c,
            row_principal,
            col_principal,
            chi2_over_n: chi2 / n,
        }
    }
}

/// Squared chi-squared distance between the profiles of columns `a` and `b`.
pub fn chi2_column_distance_sq(counts: &[Vec<u32>], a: usize, b: usize) -> f64 {
    let n: f64 = counts.iter().flatten().map(|&x| f64::from(x)).sum();
    let ta: f64 = counts.iter().map(|r| f64::from(r[a])).sum();
    let tb: f64 = counts.iter().map(|r| f64::from(r[b])).sum();
    counts
        .iter()
        .map(|row| {
            let ri = row.iter().map(|&x| f64::from(x)).sum::<f64>() / n;
            (f64::from(row[a]) / ta - f64::from(row[b]) / tb).powi(2) / ri
        })
        .sum()
}
