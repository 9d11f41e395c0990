use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random `rows x cols` table with entries in `0..=max` and no zero margin.
pub fn random_table(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max: u32) -> Vec<Vec<u32>> {
    loop {
        let t: Vec<Vec<u32>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..=max)).collect()).collect();
        let rows_ok = t.iter().all(|r| r.iter().any(|&x| x > 0));
        let cols_ok = (0..cols).all(|j| t.iter().any(|r| r[j] > 0));
        if rows_ok && cols_ok {
            return t;
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 with Box-Muller normals; simple enough to replicate bit for
/// bit in other languages when freezing reference values.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal; one Box-Muller pair per call, cosine branch only.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Draws `n` values from the named family: `normal`, `lognormal`,
    /// `uniform` or `exponential`.
    pub fn sample(&mut self, family: &str, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| match family {
                "normal" => self.normal(),
                "lognormal" => self.normal().exp(),
                "uniform" => self.uniform(),
                "exponential" => -(1.0 - self.uniform()).ln(),
                other => panic!("unknown family {other}"),
            })
            .collect()
    }
}
