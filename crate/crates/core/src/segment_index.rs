//! Per-row index structures answering every aggregation over an arbitrary
//! `[start, end]` range in `O(log w)`.
//!
//! Mean, std and slope come from prefix sums of the row shifted by its first
//! value; mean crossings from a prefix count. Order statistics and
//! above-mean counts come from a wavelet matrix over the row's value ranks.

use crate::aggregate::{aggregate, Aggregation};

/// Bit vector with constant-time rank.
#[derive(Debug, Clone)]
struct RankBits {
    words: Vec<u64>,
    // ones strictly before each word
    before: Vec<u32>,
}

impl RankBits {
    fn from_bits(bits: impl ExactSizeIterator<Item = bool>) -> Self {
        let len = bits.len();
        let mut words = vec![0u64; len / 64 + 1];
        for (i, b) in bits.enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut before = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for w in &words {
            before.push(acc);
            acc += w.count_ones();
        }
        RankBits { words, before }
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        let word = i / 64;
        let mask = (1u64 << (i % 64)) - 1;
        (self.before[word] + (self.words[word] & mask).count_ones()) as usize
    }

    #[inline]
    fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }
}

/// Wavelet matrix over a sequence of integers in `[0, 2^levels)`.
#[derive(Debug, Clone)]
struct WaveletMatrix {
    levels: Vec<RankBits>,
    zeros: Vec<usize>,
}

impl WaveletMatrix {
    fn new(mut seq: Vec<u32>) -> Self {
        let max = seq.iter().copied().max().unwrap_or(0);
        let depth = (u32::BITS - max.leading_zeros()).max(1) as usize;
        let mut levels = Vec::with_capacity(depth);
        let mut zeros = Vec::with_capacity(depth);
        for level in (0..depth).rev() {
            let bits = RankBits::from_bits(seq.iter().map(|v| (v >> level) & 1 == 1));
            let (lo, hi): (Vec<u32>, Vec<u32>) = seq.iter().partition(|v| (*v >> level) & 1 == 0);
            zeros.push(lo.len());
            levels.push(bits);
            seq = lo;
            seq.extend(hi);
        }
        WaveletMatrix { levels, zeros }
    }

    /// k-th smallest (0-based) value in positions `[s, e)`.
    fn kth_smallest(&self, mut s: usize, mut e: usize, mut k: usize) -> u32 {
        let depth = self.levels.len();
        let mut value = 0u32;
        for (d, (bits, &z)) in self.levels.iter().zip(&self.zeros).enumerate() {
            let (s0, e0) = (bits.rank0(s), bits.rank0(e));
            if k < e0 - s0 {
                s = s0;
                e = e0;
            } else {
                k -= e0 - s0;
                s = z + (s - s0);
                e = z + (e - e0);
                value |= 1 << (depth - 1 - d);
            }
        }
        value
    }

    /// Number of values `< bound` in positions `[s, e)`.
    fn count_less(&self, mut s: usize, mut e: usize, bound: u32) -> usize {
        let depth = self.levels.len();
        if depth < 32 && bound >= 1 << depth {
            return e - s;
        }
        let mut count = 0;
        for (d, (bits, &z)) in self.levels.iter().zip(&self.zeros).enumerate() {
            let (s0, e0) = (bits.rank0(s), bits.rank0(e));
            if (bound >> (depth - 1 - d)) & 1 == 1 {
                count += e0 - s0;
                s = z + (s - s0);
                e = z + (e - e0);
            } else {
                s = s0;
                e = e0;
            }
        }
        count
    }
}

/// Index over one representation row.
#[derive(Debug, Clone)]
pub(crate) struct RowIndex {
    shift: f64,
    // prefix sums over shifted values; entry i covers positions [0, i)
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    sum_t: Vec<f64>,
    // crossings[i] = crossings among pairs (j, j+1) with j < i
    crossings: Vec<u32>,
    sorted: Vec<f64>,
    ranks: WaveletMatrix,
    row: Vec<f64>,
}

impl RowIndex {
    pub(crate) fn new(row: &[f64], row_mean: f64) -> Self {
        let w = row.len();
        let shift = row.first().copied().unwrap_or(0.0);
        let mut sum = Vec::with_capacity(w + 1);
        let mut sum_sq = Vec::with_capacity(w + 1);
        let mut sum_t = Vec::with_capacity(w + 1);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        sum.push(a);
        sum_sq.push(b);
        sum_t.push(c);
        for (t, &x) in row.iter().enumerate() {
            let v = x - shift;
            a += v;
            b += v * v;
            c += t as f64 * v;
            sum.push(a);
            sum_sq.push(b);
            sum_t.push(c);
        }

        let mut crossings = Vec::with_capacity(w);
        let mut acc = 0u32;
        crossings.push(0);
        for p in row.windows(2) {
            if (p[0] - row_mean) * (p[1] - row_mean) < 0.0 {
                acc += 1;
            }
            crossings.push(acc);
        }

        let mut order: Vec<usize> = (0..w).collect();
        order.sort_by(|&i, &j| row[i].total_cmp(&row[j]));
        let sorted = order.iter().map(|&i| row[i]).collect();
        let mut rank = vec![0u32; w];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }

        RowIndex {
            shift,
            sum,
            sum_sq,
            sum_t,
            crossings,
            sorted,
            ranks: WaveletMatrix::new(rank),
            row: row.to_vec(),
        }
    }

    pub(crate) fn width(&self) -> usize {
        self.sorted.len()
    }

    #[inline]
    fn order_stat(&self, s: usize, e: usize, k: usize) -> f64 {
        self.sorted[self.ranks.kth_smallest(s, e, k) as usize]
    }

    #[inline]
    fn quantile(&self, s: usize, e: usize, p: f64) -> f64 {
        let h = (e - s - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        let a = self.order_stat(s, e, lo);
        if hi == lo {
            return a;
        }
        a + (h - lo as f64) * (self.order_stat(s, e, hi) - a)
    }

    #[inline]
    fn is_flat(&self, s: usize, e: usize) -> bool {
        self.order_stat(s, e, 0) == self.order_stat(s, e, e - s - 1)
    }

    /// `agg` over positions `[start, end]` (inclusive). Bounds are the caller's
    /// responsibility.
    pub(crate) fn aggregate(&self, agg: Aggregation, start: usize, end: usize) -> f64 {
        let (s, e) = (start, end + 1);
        let w = (e - s) as f64;
        let shifted_mean = || (self.sum[e] - self.sum[s]) / w;
        match agg {
            Aggregation::Mean => shifted_mean() + self.shift,
            Aggregation::Std => {
                if e - s < 2 || self.is_flat(s, e) {
                    return 0.0;
                }
                let mu = shifted_mean();
                let var = (self.sum_sq[e] - self.sum_sq[s]) / w - mu * mu;
                var.max(0.0).sqrt()
            }
            Aggregation::Slope => {
                if e - s < 2 || self.is_flat(s, e) {
                    return 0.0;
                }
                let sx = self.sum[e] - self.sum[s];
                // Σ (t - s) x over the range, local time origin at `s`
                let stx = (self.sum_t[e] - self.sum_t[s]) - s as f64 * sx;
                let t_mean = (w - 1.0) / 2.0;
                let den = w * (w * w - 1.0) / 12.0;
                (stx - t_mean * sx) / den
            }
            Aggregation::Median => self.quantile(s, e, 0.5),
            Aggregation::Iqr => {
                if e - s < 2 {
                    return 0.0;
                }
                self.quantile(s, e, 0.75) - self.quantile(s, e, 0.25)
            }
            Aggregation::Min => self.order_stat(s, e, 0),
            Aggregation::Max => self.order_stat(s, e, e - s - 1),
            Aggregation::Cmc => (self.crossings[e - 1] - self.crossings[s]) as f64,
            Aggregation::Cam => {
                let mu = shifted_mean() + self.shift;
                let scale = self.order_stat(s, e, 0).abs().max(self.order_stat(s, e, e - s - 1).abs());
                let tol = 1e-9 * scale;
                let near_lo = self.sorted.partition_point(|&v| v < mu - tol) as u32;
                let near_hi = self.sorted.partition_point(|&v| v <= mu + tol) as u32;
                if self.ranks.count_less(s, e, near_hi) > self.ranks.count_less(s, e, near_lo) {
                    // a value sits on the rounded mean; decide with the exact one
                    return aggregate(Aggregation::Cam, &self.row[s..e], 0.0);
                }
                let bound = self.sorted.partition_point(|&v| v <= mu) as u32;
                ((e - s) - self.ranks.count_less(s, e, bound)) as f64
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wavelet_matches_sorting() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for w in [1usize, 2, 3, 7, 64, 65, 130] {
            let seq: Vec<u32> = (0..w).map(|_| rng.random_range(0..40)).collect();
            let wm = WaveletMatrix::new(seq.clone());
            for s in 0..w {
                for e in (s + 1)..=w {
                    let mut sub = seq[s..e].to_vec();
                    sub.sort();
                    for (k, &v) in sub.iter().enumerate() {
                        assert_eq!(wm.kth_smallest(s, e, k), v);
                    }
                    for bound in [0, 5, 20, 39, 40, 1000] {
                        let want = seq[s..e].iter().filter(|&&v| v < bound).count();
                        assert_eq!(wm.count_less(s, e, bound), want);
                    }
                }
            }
        }
    }

    fn check_row(row: &[f64]) {
        let row_mean = row.iter().sum::<f64>() / row.len() as f64;
        let index = RowIndex::new(row, row_mean);
        for s in 0..row.len() {
            for e in s..row.len() {
                for agg in Aggregation::ALL {
                    let want = aggregate(agg, &row[s..=e], row_mean);
                    let got = index.aggregate(agg, s, e);
                    let scale = row.iter().map(|v| v.abs()).fold(1.0, f64::max);
                    assert!(
                        (got - want).abs() <= 1e-9 * scale,
                        "{agg} [{s},{e}] got {got} want {want} row {row:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn agrees_with_direct_aggregation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for w in [1usize, 2, 3, 5, 16, 33] {
            let row: Vec<f64> = (0..w).map(|_| rng.random_range(-5.0..5.0)).collect();
            check_row(&row);
            let ints: Vec<f64> = (0..w).map(|_| rng.random_range(0..4) as f64).collect();
            check_row(&ints);
        }
        check_row(&[1.0, 2.0, 3.0]);
        check_row(&[2.0; 6]);
        check_row(&[1000.0, 1000.5, 999.5, 1000.0, 1001.0]);
    }

    #[test]
    fn flat_segments_are_exact() {
        let row = [0.1, 0.1, 0.1, 0.7, 0.1, 0.1];
        let index = RowIndex::new(&row, 0.2);
        assert_eq!(index.aggregate(Aggregation::Std, 0, 2), 0.0);
        assert_eq!(index.aggregate(Aggregation::Slope, 0, 2), 0.0);
        assert_eq!(index.aggregate(Aggregation::Iqr, 4, 5), 0.0);
    }
}
