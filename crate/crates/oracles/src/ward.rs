/// A merge found by [`adjacent_ward_greedy`]: the two leaf intervals joined
/// (inclusive bounds) and the increase in weighted within-cluster inertia.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMerge {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub height: f64,
}

fn centroid(points: &[Vec<f64>], weights: &[f64], lo: usize, hi: usize) -> (f64, Vec<f64>) {
    let m: f64 = weights[lo..=hi].iter().sum();
    let dim = points[0].len();
    let g = (0..dim).map(|k| (lo..=hi).map(|i| weights[i] * points[i][k]).sum::<f64>() / m).collect();
    (m, g)
}

fn within(points: &[Vec<f64>], weights: &[f64], lo: usize, hi: usize) -> f64 {
    let (_, g) = centroid(points, weights, lo, hi);
    (lo..=hi)
        .map(|i| weights[i] * points[i].iter().zip(&g).map(|(x, c)| (x - c).powi(2)).sum::<f64>())
        .sum()
}

/// Agglomeration that, at every step, evaluates each adjacent pair of
/// intervals from scratch and merges the cheapest (leftmost on ties).
pub fn adjacent_ward_greedy(points: &[Vec<f64>], weights: &[f64]) -> Vec<OracleMerge> {
    let mut blocks: Vec<(usize, usize)> = (0..points.len()).map(|i| (i, i)).collect();
    let mut out = Vec::new();
    while blocks.len() > 1 {
        let mut best: Option<(usize, f64)> = None;
        for p in 0..blocks.len() - 1 {
            let (a, b) = (blocks[p], blocks[p + 1]);
            let merged = within(points, weights, a.0, b.1);
            let cost = merged - within(points, weights, a.0, a.1) - within(points, weights, b.0, b.1);
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((p, cost));
            }
        }
        let (p, cost) = best.unwrap();
        out.push(OracleMerge { left: blocks[p], right: blocks[p + 1], height: cost });
        blocks[p] = (blocks[p].0, blocks[p + 1].1);
        blocks.remove(p + 1);
    }
    out
}

/// Smallest total within-cluster inertia over all partitions of the
/// sequence into `k` contiguous blocks, by exhaustive enumeration of cuts.
pub fn best_contiguous_partition_cost(points: &[Vec<f64>], weights: &[f64], k: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    // bit i set = cut after position i
    for mask in 0u32..(1 << (n - 1)) {
        if mask.count_ones() as usize != k - 1 {
            continue;
        }
        let mut start = 0;
        let mut cost = 0.0;
        for i in 0..n {
            if i == n - 1 || mask & (1 << i) != 0 {
                cost += within(points, weights, start, i);
                start = i + 1;
            }
        }
        best = best.min(cost);
    }
    best
}
