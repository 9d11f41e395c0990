//! Shapiro–Wilk W test with Royston's approximation (Applied Statistics
//! algorithm AS R94), for complete samples of 3 to 5000 values.
//!
//! The coefficient and p-value approximations use the normal quantile of
//! AS 111 and the normal tail area of AS 66, as in the published algorithm.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sample the approximation covers.
pub const MAX_SAMPLE: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];
const SMALL_P: f64 = 1e-19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p_value: f64,
}

/// Outcome of the normality test on a distance sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Normality {
    Tested { w: f64, p_value: f64 },
    /// Every tested value is identical; W is undefined.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub n_total: usize,
    pub n_tested: usize,
    /// Mean over all `n_total` values.
    pub mean: f64,
    pub normality: Normality,
    pub subsampled: bool,
    pub seed: u64,
}

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Normal quantile, AS 111.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 4] = [2.50662823884, -18.61500062529, 41.39119773534, -25.44106049637];
    const B: [f64; 4] = [-8.47351093090, 23.08336743743, -21.06224101826, 3.13082909833];
    const C: [f64; 4] = [-2.78718931138, -2.29796479134, 4.85014127135, 2.32121276858];
    const D: [f64; 2] = [3.54388924762, 1.63706781897];
    let q = p - 0.5;
    if q.abs() <= 0.42 {
        let r = q * q;
        return q * (((A[3] * r + A[2]) * r + A[1]) * r + A[0])
            / ((((B[3] * r + B[2]) * r + B[1]) * r + B[0]) * r + 1.0);
    }
    let r = if q > 0.0 { 1.0 - p } else { p };
    if r <= 0.0 {
        return 0.0;
    }
    let r = (-r.ln()).sqrt();
    let v = (((C[3] * r + C[2]) * r + C[1]) * r + C[0]) / ((D[1] * r + D[0]) * r + 1.0);
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// Upper normal tail area `P(Z > x)`, AS 66 (upper cutoff 38).
fn normal_upper_tail(x: f64) -> f64 {
    const LTONE: f64 = 7.0;
    const UTZERO: f64 = 38.0;
    const CON: f64 = 1.28;
    let (z, upper) = if x > 0.0 { (x, true) } else { (-x, false) };
    if !(z <= LTONE || (upper && z <= UTZERO)) {
        return if upper { 0.0 } else { 1.0 };
    }
    let y = 0.5 * z * z;
    let tail = if z <= CON {
        0.5 - z
            * (0.398942280444
                - 0.399903438504 * y
                    / (y + 5.75885480458 - 29.8213557808 / (y + 2.62433121679 + 48.6959930692 / (y + 5.92885724438))))
    } else {
        0.398942280385 * (-y).exp()
            / (z - 3.8052e-8
                + 1.00000615302
                    / (z + 3.98064794e-4
                        + 1.98615381364
                            / (z - 0.151679116635
                                + 5.29330324926 / (z + 4.8385912808 - 15.1508972451 / (z + 0.742380924027 + 30.789933034 / (z + 3.99019417011))))))
    };
    if upper {
        tail
    } else {
        1.0 - tail
    }
}

/// Coefficients for the lower half of the order statistics, positive,
/// normalized so the full antisymmetric vector has unit length.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an = n as f64;
    let m: Vec<f64> = (1..=half).map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25))).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut a = vec![0.0; half];
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        ((1), ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt())
    };
    a[0] = a1;
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro–Wilk W and its p-value for `3 <= values.len() <= 5000`.
///
/// Returns `Ok(None)` when all values are identical.
pub fn shapiro_wilk(values: &[f64]) -> Result<Option<ShapiroWilk>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewValues { needed: 3, got: n });
    }
    if n > MAX_SAMPLE {
        return Err(Error::InvalidArgument(format!("Shapiro-Wilk covers at most {MAX_SAMPLE} values, got {n}")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidValue(i));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range <= 0.0 {
        return Ok(None);
    }
    let a = coefficients(n);
    // scaled to unit range for conditioning
    let xs: Vec<f64> = x.iter().map(|v| (v - x[0]) / range).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let mut ssx = 0.0;
    let mut sax = 0.0;
    let mut ssa = 0.0;
    for (i, &v) in xs.iter().enumerate() {
        let j = n - 1 - i;
        let ai = match i.cmp(&j) {
            std::cmp::Ordering::Less => -a[i],
            std::cmp::Ordering::Greater => a[j],
            std::cmp::Ordering::Equal => 0.0,
        };
        let d = v - mean;
        ssx += d * d;
        sax += ai * d;
        ssa += ai * ai;
    }
    let root = (ssa * ssx).sqrt();
    let w1 = ((root - sax) * (root + sax) / (ssa * ssx)).max(0.0);
    let w = 1.0 - w1;

    let p_value = if n == 3 {
        if w < 0.75 {
            0.0
        } else {
            (1.0 - 6.0 / std::f64::consts::PI * w.sqrt().acos()).max(0.0)
        }
    } else {
        let y = w1.ln();
        let an = n as f64;
        if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                SMALL_P
            } else {
                let y = -(gamma - y).ln();
                normal_upper_tail((y - poly(&C3, an)) / poly(&C4, an).exp())
            }
        } else {
            let ln_n = an.ln();
            normal_upper_tail((y - poly(&C5, ln_n)) / poly(&C6, ln_n).exp())
        }
    };
    Ok(Some(ShapiroWilk { w, p_value: p_value.clamp(0.0, 1.0) }))
}

/// Mean of all distances plus a Shapiro–Wilk test on at most 5000 of them,
/// drawn without replacement with a ChaCha8 generator seeded by `seed`.
pub fn distance_distribution_stats(distances: &[f64], seed: u64) -> Result<DistanceStats> {
    let n = distances.len();
    if n < 3 {
        return Err(Error::TooFewValues { needed: 3, got: n });
    }
    if let Some(i) = distances.iter().position(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidValue(i));
    }
    let mean = distances.iter().sum::<f64>() / n as f64;
    let subsampled = n > MAX_SAMPLE;
    let sample: Vec<f64> = if subsampled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, n, MAX_SAMPLE).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| distances[i]).collect()
    } else {
        distances.to_vec()
    };
    let normality = match shapiro_wilk(&sample)? {
        Some(sw) => Normality::Tested { w: sw.w, p_value: sw.p_value },
        None => Normality::Degenerate,
    };
    Ok(DistanceStats { n_total: n, n_tested: sample.len(), mean, normality, subsampled, seed })
}
