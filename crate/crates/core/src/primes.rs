//! Prime generation and factorization helpers.
//!
//! Everything here is deterministic and allocation-bounded: the sieve works
//! in fixed-size segments so memory stays O(segment + pi(sqrt(n))).

/// All primes `p <= n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let root = (n as f64).sqrt() as u64 + 1;
    let mut base = vec![true; (root + 1) as usize];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut p = 2u64;
    while p * p <= root {
        if base[p as usize] {
            let mut m = p * p;
            while m <= root {
                base[m as usize] = false;
                m += p;
            }
        }
        p += 1;
    }
    let base_primes: Vec<u64> = (2..=root).filter(|&i| base[i as usize]).collect();

    let mut primes: Vec<u64> = base_primes.iter().copied().filter(|&p| p <= n).collect();
    const SEGMENT: u64 = 1 << 18;
    let mut lo = root + 1;
    let mut segment = vec![true; SEGMENT as usize];
    while lo <= n {
        let hi = (lo + SEGMENT - 1).min(n);
        let len = (hi - lo + 1) as usize;
        segment[..len].fill(true);
        for &p in &base_primes {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            if m < p * p {
                m = p * p;
            }
            while m <= hi {
                segment[(m - lo) as usize] = false;
                m += p;
            }
        }
        for i in 0..len {
            if segment[i] {
                primes.push(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    primes
}

/// Smallest-prime-factor table for `0..=n`; `spf[0] = spf[1] = 0`.
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in (2..=n).step_by(2) {
        spf[i] = 2;
    }
    let mut p = 3usize;
    while p * p <= n {
        if spf[p] == 0 {
            let mut m = p * p;
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = p as u32;
                }
                m += 2 * p;
            }
        }
        p += 2;
    }
    for i in (3..=n).step_by(2) {
        if spf[i] == 0 {
            spf[i] = i as u32;
        }
    }
    spf
}

/// Trial-division primality test; adequate for the word-size arguments
/// used throughout this crate.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization `n = prod p_i^{e_i}` by trial division, p ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    for p in [2u64, 3] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
    }
    let mut d = 5u64;
    while d * d <= n {
        for p in [d, d + 2] {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            push(p, e);
        }
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest-prime-factor table packaged with the factor walks the
/// shifted-sum pipeline needs for every n in a range.
pub struct FactorTable {
    spf: Vec<u32>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Self {
        FactorTable {
            spf: spf_table(limit as usize),
        }
    }

    pub fn limit(&self) -> u64 {
        self.spf.len() as u64 - 1
    }

    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    /// The z-smooth part of n: the product of its prime powers p^a with
    /// p <= z. The cofactor n / smooth_part is coprime to every p <= z.
    pub fn smooth_part(&self, n: u64, z: f64) -> u64 {
        let mut a = 1u64;
        let mut q = n;
        while q > 1 {
            let p = self.spf[q as usize] as u64;
            if p as f64 > z {
                break;
            }
            while q % p == 0 {
                q /= p;
                a *= p;
            }
        }
        a
    }

    /// True when some prime p > z has p^2 | n.
    pub fn has_square_factor_above(&self, n: u64, z: f64) -> bool {
        let mut q = n;
        while q > 1 {
            let p = self.spf[q as usize] as u64;
            let mut e = 0u32;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            if e >= 2 && p as f64 > z {
                return true;
            }
        }
        false
    }

    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        let mut q = n;
        let mut out = Vec::new();
        while q > 1 {
            let p = self.spf[q as usize] as u64;
            let mut e = 0u32;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Euler phi from a factorization.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Modular inverse of `a` mod `m` for coprime arguments.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let mut inv = old_s % m as i128;
    if inv < 0 {
        inv += m as i128;
    }
    Some(inv as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
    }

    #[test]
    fn prime_count_to_1e6() {
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn spf_matches_factorize() {
        let spf = spf_table(1000);
        for n in 2..=1000u64 {
            assert_eq!(spf[n as usize] as u64, factorize(n)[0].0);
        }
    }

    #[test]
    fn phi_and_inverse() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(97), 96);
        let inv = mod_inverse(3, 7).unwrap();
        assert_eq!(3 * inv % 7, 1);
        assert!(mod_inverse(6, 9).is_none());
    }
}
