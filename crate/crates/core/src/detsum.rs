//! Deterministic floating-point reduction.
//!
//! Every accumulation in this crate that can run in parallel goes through
//! these helpers: the index range is cut into fixed-size blocks, each block
//! is reduced sequentially with Neumaier compensation, and the block totals
//! are combined pairwise in index order. The result is bit-identical for
//! any thread count.

use rayon::prelude::*;

const BLOCK: u64 = 1 << 14;

/// Compensated (Neumaier) accumulator.
#[derive(Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pairwise sum of a slice in index order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        let mut acc = Neumaier::default();
        for &x in v {
            acc.add(x);
        }
        return acc.total();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Sum `f(n)` over `lo..=hi` with fixed-block pairwise reduction.
///
/// Blocks are independent, so the map may run on any number of rayon
/// workers; the combine step is sequential and order-fixed.
pub fn block_sum<F>(lo: u64, hi: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if hi < lo {
        return 0.0;
    }
    let nblocks = (hi - lo) / BLOCK + 1;
    let partials: Vec<f64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * BLOCK;
            let end = (start + BLOCK - 1).min(hi);
            let mut acc = Neumaier::default();
            for n in start..=end {
                acc.add(f(n));
            }
            acc.total()
        })
        .collect();
    pairwise_sum(&partials)
}

/// Four sums in one deterministic pass: `f(n)` yields the four addends.
pub fn block_sum4<F>(lo: u64, hi: u64, f: F) -> [f64; 4]
where
    F: Fn(u64) -> [f64; 4] + Sync,
{
    if hi < lo {
        return [0.0; 4];
    }
    let nblocks = (hi - lo) / BLOCK + 1;
    let partials: Vec<[f64; 4]> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * BLOCK;
            let end = (start + BLOCK - 1).min(hi);
            let mut acc = [Neumaier::default(); 4];
            for n in start..=end {
                let v = f(n);
                for (a, x) in acc.iter_mut().zip(v) {
                    a.add(x);
                }
            }
            [acc[0].total(), acc[1].total(), acc[2].total(), acc[3].total()]
        })
        .collect();
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let col: Vec<f64> = partials.iter().map(|p| p[k]).collect();
        *o = pairwise_sum(&col);
    }
    out
}

/// Sum `f(p)` over the primes in a slice, blockwise and order-fixed.
pub fn block_sum_over<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let partials: Vec<f64> = items
        .par_chunks(BLOCK as usize)
        .map(|chunk| {
            let mut acc = Neumaier::default();
            for it in chunk {
                acc.add(f(it));
            }
            acc.total()
        })
        .collect();
    pairwise_sum(&partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_on_integers() {
        let s = block_sum(1, 100_000, |n| n as f64);
        assert_eq!(s, 100_000.0 * 100_001.0 / 2.0);
    }

    #[test]
    fn block_layout_is_thread_independent() {
        // Same bits regardless of how rayon schedules the blocks: run the
        // identical reduction twice and on differently sized inputs.
        let a = block_sum(1, 1_000_003, |n| 1.0 / n as f64);
        let b = block_sum(1, 1_000_003, |n| 1.0 / n as f64);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn compensation_beats_naive() {
        let n = 10_000_000u64;
        let s = block_sum(1, n, |_| 0.1);
        assert!((s - 0.1 * n as f64).abs() < 1e-4);
    }
}
