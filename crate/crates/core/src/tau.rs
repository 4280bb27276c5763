//! Exact Fourier coefficients of the weight-12 discriminant form.
//!
//! The generating series is built as `q * (eta^3)^8` where the cube of the
//! Dedekind eta series has Jacobi's closed form
//! `sum_k (-1)^k (2k+1) q^{k(k+1)/2}`: one sparse seed and three truncated
//! squarings reach the 24th power. Squarings run per residue channel with
//! cyclic NTTs; the channel count is chosen so the combined modulus exceeds
//! twice a crude L1-norm bound on every intermediate coefficient, and the
//! coefficients are recovered exactly by balanced CRT. The only rounding
//! happens at the final conversion of each coefficient to `f64`.

use crate::crt::CrtBasis;
use crate::error::{Error, Result};
use crate::ntt::{NttPlan, CHANNEL_PRIMES, MAX_NTT_LEN};
use rayon::prelude::*;

/// Largest `n` for which `lambda(1..=n)` can be generated. Transforms are
/// capped at length 2^26 by the channel 2-adicity.
pub const DELTA_TABLE_CEILING: u64 = 32_000_000;

/// Exact integer coefficients tau(1..=limit).
#[derive(Debug)]
pub struct TauSeries {
    limit: u64,
    coeffs: Vec<i128>,
}

impl TauSeries {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// tau(n), 1-indexed.
    pub fn tau(&self, n: u64) -> i128 {
        self.coeffs[n as usize]
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs[1..]
    }
}

/// Jacobi's series for eta^3 truncated to `len` coefficients: pairs
/// (degree, signed coefficient).
fn eta3_sparse(len: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let deg = k * (k + 1) / 2;
        if deg >= len {
            break;
        }
        let c = (2 * k + 1) as i64;
        out.push((deg, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }
    out
}

/// log2 of the L1-norm bound on the final (largest) intermediate: three
/// squarings of a series whose L1 norm is that of the eta^3 seed.
fn required_bits(len: usize) -> f64 {
    let l1: f64 = eta3_sparse(len).iter().map(|&(_, c)| c.abs() as f64).sum();
    8.0 * l1.log2() + 2.0
}

fn channel_count(len: usize) -> usize {
    let need = required_bits(len);
    let mut acc = 0.0;
    for (i, &(p, _)) in CHANNEL_PRIMES.iter().enumerate() {
        acc += (p as f64).log2();
        if acc > need {
            return i + 1;
        }
    }
    CHANNEL_PRIMES.len()
}

/// Exact coefficients 0..len-1 of (eta^3)^2 = eta^6 by sparse
/// self-convolution; the L1 norm keeps every value well inside i64.
fn eta6_dense(len: usize) -> Vec<i64> {
    let seed = eta3_sparse(len);
    let mut out = vec![0i64; len];
    for (a, &(di, ci)) in seed.iter().enumerate() {
        if 2 * di < len {
            out[2 * di] += ci * ci;
        }
        for &(dj, cj) in &seed[a + 1..] {
            let d = di + dj;
            if d >= len {
                break;
            }
            out[d] += 2 * ci * cj;
        }
    }
    out
}

/// Coefficients 0..len-1 of (eta^3)^8 on each residue channel: the exact
/// eta^6 seed reduced per channel, then two truncated cyclic squarings.
fn eta24_channels(len: usize) -> Vec<(u64, Vec<u64>)> {
    let f2 = eta6_dense(len);
    let nch = channel_count(len);
    let tlen = (2 * len - 1).next_power_of_two().max(2);
    assert!(tlen <= MAX_NTT_LEN);

    CHANNEL_PRIMES[..nch]
        .par_iter()
        .map(|&(p, g)| {
            let plan = NttPlan::new(p, g, tlen);
            let m = plan.m;
            let mut cur: Vec<u64> = f2
                .iter()
                .map(|&c| {
                    if c >= 0 {
                        c as u64
                    } else {
                        p - (-c) as u64
                    }
                })
                .collect();
            let mut scratch = vec![0u64; tlen];
            for _ in 0..2 {
                scratch.fill(0);
                for (s, &c) in scratch.iter_mut().zip(cur.iter()) {
                    *s = m.to_mont(c);
                }
                plan.cyclic_square(&mut scratch);
                for (c, &s) in cur.iter_mut().zip(scratch.iter()) {
                    *c = m.from_mont(s);
                }
            }
            (p, cur)
        })
        .collect()
}

fn check_len(n: u64) -> Result<usize> {
    if n < 1 {
        return Err(Error::Argument("table limit must be >= 1".into()));
    }
    if n > DELTA_TABLE_CEILING {
        return Err(Error::Capacity(format!(
            "requested limit {n} exceeds ceiling {DELTA_TABLE_CEILING}"
        )));
    }
    Ok(n as usize)
}

/// Exact tau(1..=n). Fails with a capacity error once coefficients leave
/// the i128 range (around n = 2 * 10^6).
pub fn tau_series(n: u64) -> Result<TauSeries> {
    let len = check_len(n)?;
    let channels = eta24_channels(len);
    let basis = CrtBasis::new(&channels.iter().map(|&(p, _)| p).collect::<Vec<_>>());
    let mut coeffs = vec![0i128; len + 1];
    let mut residues = vec![0u64; channels.len()];
    for deg in 0..len {
        for (r, (_, ch)) in residues.iter_mut().zip(channels.iter()) {
            *r = ch[deg];
        }
        coeffs[deg + 1] = basis.reconstruct(&residues).to_i128().ok_or_else(|| {
            Error::Capacity(format!("tau({}) exceeds exact i128 storage", deg + 1))
        })?;
    }
    Ok(TauSeries { limit: n, coeffs })
}

/// Hecke-normalized lambda(n) = tau(n) / n^{11/2} for n = 1..=limit,
/// returned 1-indexed (slot 0 unused). tau is carried exactly through the
/// channels; the division is the single rounding site.
pub fn delta_lambda_values(n: u64) -> Result<Vec<f64>> {
    let len = check_len(n)?;
    let channels = eta24_channels(len);
    let basis = CrtBasis::new(&channels.iter().map(|&(p, _)| p).collect::<Vec<_>>());
    let mut values = vec![0.0f64; len + 1];
    values[1..]
        .par_chunks_mut(1 << 14)
        .enumerate()
        .for_each(|(chunk_idx, chunk)| {
            let base = chunk_idx << 14;
            let mut residues = vec![0u64; channels.len()];
            for (off, v) in chunk.iter_mut().enumerate() {
                let deg = base + off;
                for (r, (_, ch)) in residues.iter_mut().zip(channels.iter()) {
                    *r = ch[deg];
                }
                let tau = basis.reconstruct(&residues).to_f64();
                let x = (deg + 1) as f64;
                *v = tau / (x.powi(5) * x.sqrt());
            }
        });
    Ok(values)
}
