//! Number-theoretic transforms over word-size primes.
//!
//! Each residue channel is an odd prime `p = c * 2^k + 1` with `k >= 26`,
//! so cyclic convolutions up to length 2^26 are available. Convolution
//! uses the permutation-free pair DIF-forward / DIT-inverse: the forward
//! pass leaves the spectrum in bit-reversed order, the inverse pass
//! consumes it in that order, and no reordering pass ever touches memory.
//! Arithmetic is Montgomery form throughout.

/// Residue channels, in fixed order. 62-bit primes with 2-adicity >= 26
/// and a verified primitive root each.
pub const CHANNEL_PRIMES: [(u64, u64); 5] = [
    (4_611_686_017_554_972_673, 5),
    (4_611_686_015_004_835_841, 3),
    (4_611_686_009_971_671_041, 6),
    (4_611_686_007_555_751_937, 3),
    (4_611_686_007_488_643_073, 5),
];

/// Maximum supported transform length (limited by channel 2-adicity).
pub const MAX_NTT_LEN: usize = 1 << 26;

/// Montgomery multiplication domain for an odd modulus `p < 2^62`.
#[derive(Clone, Copy)]
pub struct Montgomery {
    pub p: u64,
    /// -p^{-1} mod 2^64
    ninv: u64,
    /// 2^128 mod p, for conversion into the domain
    r2: u64,
}

impl Montgomery {
    pub fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < (1 << 62));
        // Newton iteration for p^{-1} mod 2^64.
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let ninv = inv.wrapping_neg();
        let r = (1u128 << 64) % p as u128;
        let r2 = (r * r % p as u128) as u64;
        Montgomery { p, ninv, r2 }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let t2 = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if t2 >= self.p {
            t2 - self.p
        } else {
            t2
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    #[inline(always)]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    /// `base^e` where base is in Montgomery form.
    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Plan for cyclic convolutions of one fixed power-of-two length on one
/// channel.
pub struct NttPlan {
    pub m: Montgomery,
    len: usize,
    omega: u64,
    omega_inv: u64,
    len_inv: u64,
}

impl NttPlan {
    pub fn new(prime: u64, generator: u64, len: usize) -> Self {
        assert!(len.is_power_of_two() && len <= MAX_NTT_LEN && len >= 2);
        let m = Montgomery::new(prime);
        assert_eq!((prime - 1) % len as u64, 0, "channel lacks 2-adicity");
        let omega = m.pow(m.to_mont(generator), (prime - 1) / len as u64);
        let omega_inv = m.pow(omega, prime - 2);
        let len_inv = m.pow(m.to_mont(len as u64), prime - 2);
        NttPlan {
            m,
            len,
            omega,
            omega_inv,
            len_inv,
        }
    }

    /// Gentleman-Sande forward pass: natural order in, bit-reversed
    /// spectrum out. Twiddles are generated on the fly; every memory
    /// access is sequential.
    fn dif_forward(&self, a: &mut [u64]) {
        let m = &self.m;
        let n = self.len;
        let mut len = n;
        while len >= 2 {
            let half = len / 2;
            let w_unit = self.m.pow(self.omega, (n / len) as u64);
            let mut start = 0usize;
            while start < n {
                let (lo, hi) = a[start..start + len].split_at_mut(half);
                let mut w = m.to_mont(1);
                for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                    let x = *u;
                    let y = *v;
                    *u = m.add(x, y);
                    *v = m.mul(m.sub(x, y), w);
                    w = m.mul(w, w_unit);
                }
                start += len;
            }
            len = half;
        }
    }

    /// Cooley-Tukey pass with inverse twiddles: bit-reversed spectrum in,
    /// natural order out, scaled by 1/len.
    fn dit_inverse(&self, a: &mut [u64]) {
        let m = &self.m;
        let n = self.len;
        let mut len = 2usize;
        while len <= n {
            let half = len / 2;
            let w_unit = self.m.pow(self.omega_inv, (n / len) as u64);
            let mut start = 0usize;
            while start < n {
                let (lo, hi) = a[start..start + len].split_at_mut(half);
                let mut w = m.to_mont(1);
                for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                    let x = *u;
                    let y = m.mul(*v, w);
                    *u = m.add(x, y);
                    *v = m.sub(x, y);
                    w = m.mul(w, w_unit);
                }
                start += len;
            }
            len *= 2;
        }
        for x in a.iter_mut() {
            *x = m.mul(*x, self.len_inv);
        }
    }

    /// Cyclic self-convolution: replaces `a` (natural order, Montgomery
    /// form) with `a * a mod (x^len - 1)`.
    pub fn cyclic_square(&self, a: &mut [u64]) {
        assert_eq!(a.len(), self.len);
        self.dif_forward(a);
        let m = &self.m;
        for x in a.iter_mut() {
            *x = m.mul(*x, *x);
        }
        self.dit_inverse(a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_roundtrip() {
        let m = Montgomery::new(CHANNEL_PRIMES[0].0);
        for v in [0u64, 1, 2, 12345, m.p - 1] {
            assert_eq!(m.from_mont(m.to_mont(v)), v);
        }
        let a = m.to_mont(1_000_000_007);
        let b = m.to_mont(998_244_353);
        let prod = m.from_mont(m.mul(a, b));
        let expect = (1_000_000_007u128 * 998_244_353u128 % m.p as u128) as u64;
        assert_eq!(prod, expect);
    }

    #[test]
    fn channels_have_claimed_roots() {
        for &(p, g) in &CHANNEL_PRIMES {
            let m = Montgomery::new(p);
            // g^((p-1)/2) must be -1 for a primitive root of an odd prime,
            // and the 2^26-th root must have exact order 2^26.
            let half = m.pow(m.to_mont(g), (p - 1) / 2);
            assert_eq!(m.from_mont(half), p - 1);
            let w = m.pow(m.to_mont(g), (p - 1) / (1u64 << 26));
            assert_eq!(m.from_mont(m.pow(w, 1 << 26)), 1);
            assert_ne!(m.from_mont(m.pow(w, 1 << 25)), 1);
        }
    }

    #[test]
    fn squaring_matches_schoolbook() {
        for (idx, &(p, g)) in CHANNEL_PRIMES.iter().enumerate() {
            let len = 64usize;
            let plan = NttPlan::new(p, g, len);
            let m = plan.m;
            let coeffs: Vec<u64> = (0..40u64).map(|i| (i * i * 7 + 3 * i + idx as u64) % 997).collect();

            let mut a = vec![0u64; len];
            for (i, &c) in coeffs.iter().enumerate() {
                a[i] = m.to_mont(c);
            }
            plan.cyclic_square(&mut a);
            let got: Vec<u64> = a.iter().map(|&x| m.from_mont(x)).collect();

            let mut expect = vec![0u64; len];
            for i in 0..coeffs.len() {
                for j in 0..coeffs.len() {
                    expect[(i + j) % len] =
                        ((expect[(i + j) % len] as u128 + coeffs[i] as u128 * coeffs[j] as u128)
                            % p as u128) as u64;
                }
            }
            assert_eq!(got, expect, "channel {idx}");
        }
    }

    #[test]
    fn wraparound_is_cyclic() {
        let (p, g) = CHANNEL_PRIMES[2];
        let len = 8usize;
        let plan = NttPlan::new(p, g, len);
        let m = plan.m;
        // x^7 squared = x^14 = x^6 mod (x^8 - 1)
        let mut a = vec![0u64; len];
        a[7] = m.to_mont(1);
        plan.cyclic_square(&mut a);
        let got: Vec<u64> = a.iter().map(|&x| m.from_mont(x)).collect();
        let mut expect = vec![0u64; len];
        expect[6] = 1;
        assert_eq!(got, expect);
    }
}
