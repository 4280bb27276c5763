//! Smooth and rough integer counting, and the Rankin-trick majorant.
//!
//! An integer is z-smooth when all its prime factors are <= z, and rough
//! when it is coprime to the product of the primes up to z. Smooth counts
//! are exact DFS enumerations over prime-power products; rough counts use
//! segmented marking so memory stays O(segment).

use crate::detsum::Neumaier;
use crate::error::{Error, Result};
use crate::primes;

fn check_xz(x: f64, z: f64) -> Result<()> {
    if !(x >= 1.0) {
        return Err(Error::Argument(format!("x must be >= 1, got {x}")));
    }
    if !(z >= 2.0) {
        return Err(Error::Argument(format!("z must be >= 2, got {z}")));
    }
    Ok(())
}

/// Exact count of n <= x whose prime factors are all <= z.
pub fn smooth_count(x: f64, z: f64) -> Result<u64> {
    check_xz(x, z)?;
    let xi = x.floor() as u64;
    let ps = primes::primes_up_to(z.min(x) as u64);
    fn dfs(ps: &[u64], start: usize, cur: u64, x: u64) -> u64 {
        let mut count = 1u64;
        for i in start..ps.len() {
            if cur > x / ps[i] {
                break;
            }
            count += dfs(ps, i, cur * ps[i], x);
        }
        count
    }
    Ok(dfs(&ps, 0, 1, xi))
}

/// The Rankin majorant `x^alpha * prod_{p<=z} (1 - p^{-alpha})^{-1}`.
///
/// For any 0 < alpha <= 1 this dominates `smooth_count(x, z)` exactly:
/// every z-smooth a <= x contributes (x/a)^alpha >= 1, and extending the
/// sum over all smooth integers factors it into the Euler product.
pub fn rankin_alpha_bound(x: f64, z: f64, alpha: f64) -> Result<f64> {
    check_xz(x, z)?;
    if !(alpha > 0.0) {
        return Err(Error::Argument(format!("alpha must be > 0, got {alpha}")));
    }
    let mut log_prod = Neumaier::default();
    for p in primes::primes_up_to(z as u64) {
        log_prod.add(-(1.0 - (p as f64).powf(-alpha)).ln());
    }
    Ok((alpha * x.ln() + log_prod.total()).exp())
}

#[derive(Clone, Copy, Debug)]
pub struct RoughCount {
    /// Exact number of n <= x coprime to every prime <= z.
    pub count: u64,
    /// `x * prod_{p<=z} (1 - 1/p)`.
    pub main: f64,
    /// Inclusion-exclusion bound `2^{pi(z)}` on |count - main|.
    pub error_bound: f64,
}

/// Count of n <= x coprime to P(z), with its density main term.
pub fn rough_count(x: f64, z: f64) -> Result<RoughCount> {
    check_xz(x, z)?;
    let xi = x.floor() as u64;
    let ps = primes::primes_up_to(z as u64);

    const SEGMENT: u64 = 1 << 18;
    let mut count = 0u64;
    let mut lo = 1u64;
    let mut marked = vec![false; SEGMENT as usize];
    while lo <= xi {
        let hi = (lo + SEGMENT - 1).min(xi);
        let len = (hi - lo + 1) as usize;
        marked[..len].fill(false);
        for &p in &ps {
            if p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                marked[(m - lo) as usize] = true;
                m += p;
            }
        }
        count += marked[..len].iter().filter(|&&b| !b).count() as u64;
        lo = hi + 1;
    }

    let mut main = x;
    for &p in &ps {
        main *= 1.0 - 1.0 / p as f64;
    }
    Ok(RoughCount {
        count,
        main,
        error_bound: 2f64.powi(ps.len() as i32),
    })
}

/// The classical asymptotic shape `x log z exp(-log x / log z)` of the
/// Rankin bound. Reference value only: its implied constant is
/// unspecified, so it is reported alongside counts but never used as an
/// inequality.
pub fn rankin_asymptotic_form(x: f64, z: f64) -> f64 {
    x * z.ln() * (-x.ln() / z.ln()).exp()
}

/// Exact `sum 1/a` over z-smooth a with `x^cutoff < a <= x`.
pub fn smooth_reciprocal_tail(x: f64, z: f64, cutoff: f64) -> Result<f64> {
    check_xz(x, z)?;
    if !(0.0..1.0).contains(&cutoff) {
        return Err(Error::Argument(format!(
            "cutoff must lie in [0, 1), got {cutoff}"
        )));
    }
    let xi = x.floor() as u64;
    let threshold = x.powf(cutoff);
    let ps = primes::primes_up_to(z.min(x) as u64);
    fn dfs(ps: &[u64], start: usize, cur: u64, x: u64, threshold: f64, acc: &mut Neumaier) {
        if cur as f64 > threshold {
            acc.add(1.0 / cur as f64);
        }
        for i in start..ps.len() {
            if cur > x / ps[i] {
                break;
            }
            dfs(ps, i, cur * ps[i], x, threshold, acc);
        }
    }
    let mut acc = Neumaier::default();
    dfs(&ps, 0, 1, xi, threshold, &mut acc);
    Ok(acc.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_count_examples() {
        assert_eq!(smooth_count(10.0, 2.0).unwrap(), 4); // 1,2,4,8
        assert_eq!(smooth_count(100.0, 5.0).unwrap(), 34);
        for x in [17.0, 100.0, 1000.5] {
            assert_eq!(smooth_count(x, x + 1.0).unwrap(), x.floor() as u64);
        }
    }

    #[test]
    fn smooth_count_complement() {
        // count of non-smooth by direct factorization
        for (x, z) in [(500u64, 7.0), (2000, 13.0)] {
            let non_smooth = (1..=x)
                .filter(|&n| primes::factorize(n).iter().any(|&(p, _)| p as f64 > z))
                .count() as u64;
            assert_eq!(smooth_count(x as f64, z).unwrap() + non_smooth, x);
        }
    }

    #[test]
    fn rankin_bound_examples() {
        let b = rankin_alpha_bound(10.0, 2.0, 1.0).unwrap();
        assert!((b - 20.0).abs() < 1e-9);
        assert!(b >= 4.0);

        let b = rankin_alpha_bound(100.0, 5.0, 0.9).unwrap();
        assert!(b >= 34.0);

        let z = 100.0f64;
        let alpha = 1.0 - 1.0 / z.ln();
        let b = rankin_alpha_bound(1e6, z, alpha).unwrap();
        let c = smooth_count(1e6, z).unwrap();
        assert!(b >= c as f64, "bound {b} < count {c}");

        assert!(matches!(
            rankin_alpha_bound(10.0, 2.0, 0.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn rough_count_examples() {
        let r = rough_count(30.0, 5.0).unwrap();
        assert_eq!(r.count, 8); // 1,7,11,13,17,19,23,29
        assert!((r.main - 8.0).abs() < 1e-12); // 30 * 1/2 * 2/3 * 4/5
        assert!((r.count as f64 - r.main).abs() <= r.error_bound);

        let r = rough_count(50.0, 50.0).unwrap();
        assert_eq!(r.count, 1);
    }

    #[test]
    fn legendre_error_small_grid() {
        for z in [2.0, 3.0, 5.0, 7.0, 11.0, 13.0] {
            for x in [10.0, 100.0, 1234.0, 99999.0] {
                let r = rough_count(x, z).unwrap();
                assert!(
                    (r.count as f64 - r.main).abs() <= r.error_bound,
                    "x={x} z={z}: {} vs {} bound {}",
                    r.count,
                    r.main,
                    r.error_bound
                );
            }
        }
    }

    #[test]
    fn asymptotic_form_shape() {
        // not an inequality, but the shape should track the true count
        // within a couple orders of magnitude on easy inputs
        let v = rankin_asymptotic_form(1e6, 100.0);
        let c = smooth_count(1e6, 100.0).unwrap() as f64;
        assert!(v > c / 100.0 && v < c * 100.0, "{v} vs {c}");
    }

    #[test]
    fn reciprocal_tail_examples() {
        // powers of 2 in (100^{1/16}, 100]: 2..64
        let t = smooth_reciprocal_tail(100.0, 2.0, 1.0 / 16.0).unwrap();
        let expect: f64 = [2u64, 4, 8, 16, 32, 64].iter().map(|&a| 1.0 / a as f64).sum();
        assert!((t - expect).abs() < 1e-12);

        // harmonic region check: z >= x, cutoff = 0
        let t = smooth_reciprocal_tail(50.0, 64.0, 0.0).unwrap();
        let harmonic: f64 = (2..=50u64).map(|a| 1.0 / a as f64).sum();
        assert!((t - harmonic).abs() < 1e-12);

        // empty range
        let t = smooth_reciprocal_tail(1.0, 2.0, 0.5).unwrap();
        assert_eq!(t, 0.0);
    }
}
