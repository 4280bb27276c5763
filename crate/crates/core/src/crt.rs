//! Chinese-remainder reconstruction with balanced representatives.
//!
//! Residue vectors come out of the NTT channels; Garner's algorithm turns
//! them into mixed-radix digits, which are assembled exactly into a small
//! fixed-width integer. The balanced representative (the unique lift in
//! `(-M/2, M/2]`) is then converted to `f64` or `i128`. All steps are
//! exact until the final conversion.

const MAX_LIMBS: usize = 6;

/// Little-endian fixed-width unsigned integer, wide enough for the
/// product of every channel modulus.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Wide {
    limbs: [u64; MAX_LIMBS],
}

impl Wide {
    fn zero() -> Self {
        Wide { limbs: [0; MAX_LIMBS] }
    }

    fn from_u64(v: u64) -> Self {
        let mut w = Self::zero();
        w.limbs[0] = v;
        w
    }

    fn mul_u64(&self, v: u64) -> Wide {
        let mut out = Wide::zero();
        let mut carry = 0u128;
        for i in 0..MAX_LIMBS {
            let t = self.limbs[i] as u128 * v as u128 + carry;
            out.limbs[i] = t as u64;
            carry = t >> 64;
        }
        debug_assert_eq!(carry, 0, "wide overflow");
        out
    }

    fn add_assign(&mut self, other: &Wide) {
        let mut carry = 0u128;
        for i in 0..MAX_LIMBS {
            let t = self.limbs[i] as u128 + other.limbs[i] as u128 + carry;
            self.limbs[i] = t as u64;
            carry = t >> 64;
        }
        debug_assert_eq!(carry, 0, "wide overflow");
    }

    fn sub(&self, other: &Wide) -> Wide {
        let mut out = Wide::zero();
        let mut borrow = 0i128;
        for i in 0..MAX_LIMBS {
            let t = self.limbs[i] as i128 - other.limbs[i] as i128 - borrow;
            if t < 0 {
                out.limbs[i] = (t + (1i128 << 64)) as u64;
                borrow = 1;
            } else {
                out.limbs[i] = t as u64;
                borrow = 0;
            }
        }
        debug_assert_eq!(borrow, 0, "wide underflow");
        out
    }

    fn cmp_wide(&self, other: &Wide) -> std::cmp::Ordering {
        for i in (0..MAX_LIMBS).rev() {
            match self.limbs[i].cmp(&other.limbs[i]) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }

    fn shr1(&self) -> Wide {
        let mut out = Wide::zero();
        for i in 0..MAX_LIMBS {
            out.limbs[i] = self.limbs[i] >> 1;
            if i + 1 < MAX_LIMBS {
                out.limbs[i] |= self.limbs[i + 1] << 63;
            }
        }
        out
    }

    fn to_f64(self) -> f64 {
        let top = match (0..MAX_LIMBS).rev().find(|&i| self.limbs[i] != 0) {
            Some(t) => t,
            None => return 0.0,
        };
        if top == 0 {
            return self.limbs[0] as f64;
        }
        let hi = ((self.limbs[top] as u128) << 64) | self.limbs[top - 1] as u128;
        // Limbs below the top two contribute < 2^-64 relatively.
        (hi as f64) * 2f64.powi(64 * (top as i32 - 1))
    }

    fn to_i128_magnitude(self) -> Option<u128> {
        for i in 2..MAX_LIMBS {
            if self.limbs[i] != 0 {
                return None;
            }
        }
        let v = ((self.limbs[1] as u128) << 64) | self.limbs[0] as u128;
        if v > i128::MAX as u128 {
            None
        } else {
            Some(v)
        }
    }
}

/// Signed balanced value reconstructed from channel residues.
#[derive(Clone, Copy)]
pub struct Balanced {
    negative: bool,
    magnitude: Wide,
}

impl Balanced {
    pub fn to_f64(self) -> f64 {
        let v = self.magnitude.to_f64();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn to_i128(self) -> Option<i128> {
        let mag = self.magnitude.to_i128_magnitude()?;
        if self.negative {
            Some(-(mag as i128))
        } else {
            Some(mag as i128)
        }
    }
}

/// Garner reconstruction over a fixed ordered set of moduli.
pub struct CrtBasis {
    moduli: Vec<u64>,
    /// inv_prefix[i] = (m_0 * ... * m_{i-1})^{-1} mod m_i
    inv_prefix: Vec<u64>,
    /// prefix_mod[i][j] = (m_0 * ... * m_{j-1}) mod m_i, j < i
    prefix_mod: Vec<Vec<u64>>,
    /// prefix[i] = m_0 * ... * m_{i-1} as a wide integer
    prefix: Vec<Wide>,
    modulus_half: Wide,
    modulus: Wide,
}

impl CrtBasis {
    pub fn new(moduli: &[u64]) -> Self {
        assert!(!moduli.is_empty() && moduli.len() <= MAX_LIMBS - 1);
        let k = moduli.len();
        let mut inv_prefix = vec![0u64; k];
        let mut prefix_mod = vec![Vec::new(); k];
        let mut prefix = Vec::with_capacity(k + 1);
        prefix.push(Wide::from_u64(1));
        for i in 0..k {
            let mi = moduli[i];
            let mut acc = 1u64;
            let mut mods = Vec::with_capacity(i);
            for &mj in &moduli[..i] {
                mods.push(acc);
                acc = (acc as u128 * (mj % mi) as u128 % mi as u128) as u64;
            }
            mods.push(acc); // (m_0..m_{i-1}) mod m_i at position i
            prefix_mod[i] = mods;
            if i > 0 {
                inv_prefix[i] =
                    crate::primes::mod_inverse(prefix_mod[i][i], mi).expect("moduli not coprime");
            }
            let next = prefix[i].mul_u64(mi);
            prefix.push(next);
        }
        let modulus = prefix[k];
        CrtBasis {
            moduli: moduli.to_vec(),
            inv_prefix,
            prefix_mod,
            prefix,
            modulus_half: modulus.shr1(),
            modulus,
        }
    }

    /// Balanced representative of the residue vector.
    pub fn reconstruct(&self, residues: &[u64]) -> Balanced {
        debug_assert_eq!(residues.len(), self.moduli.len());
        let k = self.moduli.len();
        let mut digits = [0u64; MAX_LIMBS];
        for i in 0..k {
            let mi = self.moduli[i];
            // value-so-far mod m_i
            let mut part = 0u128;
            for j in 0..i {
                part = (part + digits[j] as u128 * self.prefix_mod[i][j] as u128) % mi as u128;
            }
            let mut d = residues[i] as i128 - part as i128;
            if d < 0 {
                d += mi as i128;
            }
            let d = if i == 0 {
                d as u64 % mi
            } else {
                (d as u128 * self.inv_prefix[i] as u128 % mi as u128) as u64
            };
            digits[i] = d;
        }
        let mut value = Wide::zero();
        for i in 0..k {
            value.add_assign(&self.prefix[i].mul_u64(digits[i]));
        }
        if value.cmp_wide(&self.modulus_half) == std::cmp::Ordering::Greater {
            Balanced {
                negative: true,
                magnitude: self.modulus.sub(&value),
            }
        } else {
            Balanced {
                negative: false,
                magnitude: value,
            }
        }
    }

    /// log2 of the combined modulus.
    pub fn bits(&self) -> f64 {
        self.moduli.iter().map(|&m| (m as f64).log2()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntt::CHANNEL_PRIMES;

    fn residues(v: i128, moduli: &[u64]) -> Vec<u64> {
        moduli
            .iter()
            .map(|&m| (v.rem_euclid(m as i128)) as u64)
            .collect()
    }

    #[test]
    fn roundtrip_signed_values() {
        let moduli: Vec<u64> = CHANNEL_PRIMES.iter().take(3).map(|&(p, _)| p).collect();
        let basis = CrtBasis::new(&moduli);
        for v in [
            0i128,
            1,
            -1,
            -24,
            252,
            i128::from(u64::MAX),
            -(1i128 << 100),
            (1i128 << 120) + 12345,
            -((1i128 << 120) + 99),
        ] {
            let b = basis.reconstruct(&residues(v, &moduli));
            assert_eq!(b.to_i128(), Some(v), "value {v}");
            let f = b.to_f64();
            let rel = if v == 0 {
                f.abs()
            } else {
                (f - v as f64).abs() / (v as f64).abs()
            };
            assert!(rel < 1e-12, "f64 conversion of {v}: {f}");
        }
    }

    #[test]
    fn balanced_wraps_at_half_modulus() {
        let moduli = vec![97u64, 101];
        let basis = CrtBasis::new(&moduli);
        // -5 mod 9797
        let b = basis.reconstruct(&residues(-5, &moduli));
        assert_eq!(b.to_i128(), Some(-5));
        let b = basis.reconstruct(&residues(4898, &moduli)); // just under half
        assert_eq!(b.to_i128(), Some(4898));
        let b = basis.reconstruct(&residues(4899, &moduli)); // wraps negative
        assert_eq!(b.to_i128(), Some(4899 - 9797));
    }
}
