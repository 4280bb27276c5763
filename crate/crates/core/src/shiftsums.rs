//! Shifted convolution sums `S_l(x) = sum_{n<=x} |lambda(n) lambda(n+l)|`
//! and the factorization pipeline that bounds them: the smooth/rough
//! split of n and n+l, the partition by smooth-cofactor size, the sifting
//! sums fed to the double upper-bound sieve, and the progression sums
//! whose main terms come from the Rankin-Selberg pole.

use crate::detsum::{block_sum, block_sum4, Neumaier};
use crate::error::{Error, Result};
use crate::eulerprod::{self, ZETA2};
use crate::hecke::EigenvalueTable;
use crate::primes::{self, FactorTable};

/// Default exponent: smooth cofactors above x^{1/16} are "large".
pub const CUTOFF_EXP: f64 = 1.0 / 16.0;
/// Default sieve-level exponent D = x^{1/64}.
pub const LEVEL_EXP: f64 = 1.0 / 64.0;
/// Exponent of the decay-table normalization column.
pub const DECAY_NORM_EXP: f64 = 1.0 / 7.0;

/// Unique factorization n = smooth * rough with every prime of `smooth`
/// at most z and `rough` coprime to all primes up to z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmoothSplit {
    pub n: u64,
    pub smooth: u64,
    pub rough: u64,
}

pub fn smooth_split(n: u64, z: f64) -> SmoothSplit {
    let mut smooth = 1u64;
    let mut rough = n;
    for p in primes::primes_up_to(z as u64) {
        while rough % p == 0 {
            rough /= p;
            smooth *= p;
        }
        if rough == 1 {
            break;
        }
    }
    SmoothSplit { n, smooth, rough }
}

/// The completely-multiplicative-away-from-6 majorant of lambda^2 mu^2:
/// `eta(p^a) = lambda^2(p)` for p | 6 and `lambda(p)^{2a}` otherwise,
/// tabulated for every n up to the table limit.
pub struct EtaFunction<'a> {
    table: &'a EigenvalueTable,
    factors: FactorTable,
    eta: Vec<f64>,
}

impl<'a> EtaFunction<'a> {
    pub fn new(table: &'a EigenvalueTable) -> Self {
        let limit = table.limit();
        let factors = FactorTable::new(limit);
        let mut eta = vec![0.0f64; limit as usize + 1];
        if limit >= 1 {
            eta[1] = 1.0;
        }
        for n in 2..=limit {
            let p = factors.spf(n);
            let mut q = n;
            let mut e = 0i32;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            let head = if p == 2 || p == 3 {
                table.lambda(p).powi(2)
            } else {
                table.lambda(p).powi(2 * e)
            };
            eta[n as usize] = head * eta[q as usize];
        }
        EtaFunction {
            table,
            factors,
            eta,
        }
    }

    #[inline]
    pub fn value(&self, n: u64) -> f64 {
        self.eta[n as usize]
    }

    pub fn try_value(&self, n: u64) -> Result<f64> {
        if n == 0 || n > self.limit() {
            return Err(Error::Range(format!(
                "eta({n}) outside table limit {}",
                self.limit()
            )));
        }
        Ok(self.eta[n as usize])
    }

    pub fn limit(&self) -> u64 {
        self.table.limit()
    }

    pub fn table(&self) -> &EigenvalueTable {
        self.table
    }

    pub fn factors(&self) -> &FactorTable {
        &self.factors
    }
}

/// Calibrated constants carried through every main term: the symmetric
/// square value at 1 is estimated from the Rankin-Selberg average
/// `zeta(2) * (sum_{n<=x0} lambda^2(n)) / x0`, and the eta-series
/// correction factor is the truncated product.
#[derive(Clone, Copy, Debug)]
pub struct Calibration {
    pub l_hat: f64,
    pub x0: u64,
    pub gamma: f64,
    pub gamma_cutoff: u64,
}

pub const CALIBRATION_X0: u64 = 10_000_000;

impl Calibration {
    pub fn new(table: &EigenvalueTable) -> Result<Self> {
        Self::with_x0(table, CALIBRATION_X0.min(table.limit()))
    }

    pub fn with_x0(table: &EigenvalueTable, x0: u64) -> Result<Self> {
        if x0 == 0 || x0 > table.limit() {
            return Err(Error::Range(format!(
                "calibration cutoff {x0} outside table limit {}",
                table.limit()
            )));
        }
        let sum = block_sum(1, x0, |n| {
            let l = table.lambda(n);
            l * l
        });
        let gamma_cutoff = eulerprod::GAMMA_CUTOFF.min(table.limit());
        let gamma = eulerprod::gamma_correction(table, gamma_cutoff)?.value;
        Ok(Calibration {
            l_hat: ZETA2 * sum / x0 as f64,
            x0,
            gamma,
            gamma_cutoff,
        })
    }
}

fn check_shift_range(table: &EigenvalueTable, shift: i64, x: f64) -> Result<(u64, u64)> {
    if shift == 0 {
        return Err(Error::Argument("shift must be non-zero".into()));
    }
    if !(x >= 1.0) {
        return Err(Error::Argument(format!("x must be >= 1, got {x}")));
    }
    let needed = x + shift.max(0) as f64;
    if needed > table.limit() as f64 {
        return Err(Error::Range(format!(
            "need eigenvalues to {needed} but table stops at {}",
            table.limit()
        )));
    }
    let lo = if shift < 0 { 1 + (-shift) as u64 } else { 1 };
    Ok((lo, x.floor() as u64))
}

/// `sum_{n<=x} |lambda(n) lambda(n+shift)|` with deterministic reduction.
/// Terms with n + shift < 1 are absent.
pub fn shifted_sum(table: &EigenvalueTable, shift: i64, x: f64) -> Result<f64> {
    let (lo, hi) = check_shift_range(table, shift, x)?;
    Ok(block_sum(lo, hi, |n| {
        (table.lambda(n) * table.lambda(n.wrapping_add_signed(shift))).abs()
    }))
}

/// The partition of the shifted sum by the size of the smooth cofactors.
#[derive(Clone, Copy, Debug)]
pub struct PartitionSums {
    pub total: f64,
    /// Terms with the smooth part of n above x^cutoff.
    pub large_a: f64,
    /// Terms with the smooth part of n + shift above x^cutoff.
    pub large_a_shift: f64,
    /// Terms with both smooth parts at most x^cutoff.
    pub star: f64,
    pub x: f64,
    pub z: f64,
    pub shift: i64,
    pub cutoff_exp: f64,
}

/// Classify every n <= x by the sizes of the smooth cofactors of n and
/// n + shift. Terms where both cofactors are large land in both large
/// parts, so `total <= large_a + large_a_shift + star` holds rather than
/// an exact partition.
pub fn partition_sums(
    table: &EigenvalueTable,
    shift: i64,
    x: f64,
    z: f64,
    cutoff_exp: f64,
) -> Result<PartitionSums> {
    let factors = FactorTable::new(table.limit());
    partition_sums_with(table, &factors, shift, x, z, cutoff_exp)
}

/// `partition_sums` with a caller-provided factor table, for grids that
/// reuse one.
pub fn partition_sums_with(
    table: &EigenvalueTable,
    factors: &FactorTable,
    shift: i64,
    x: f64,
    z: f64,
    cutoff_exp: f64,
) -> Result<PartitionSums> {
    if !(z >= 2.0) {
        return Err(Error::Argument(format!("z must be >= 2, got {z}")));
    }
    if factors.limit() < table.limit() {
        return Err(Error::Range(
            "factor table shorter than eigenvalue table".into(),
        ));
    }
    let (lo, hi) = check_shift_range(table, shift, x)?;
    let threshold = x.powf(cutoff_exp);
    let [total, large_a, large_a_shift, star] = block_sum4(lo, hi, |n| {
        let m = n.wrapping_add_signed(shift);
        let term = (table.lambda(n) * table.lambda(m)).abs();
        let a = factors.smooth_part(n, z) as f64;
        let a_shift = factors.smooth_part(m, z) as f64;
        let big_a = a > threshold;
        let big_as = a_shift > threshold;
        [
            term,
            if big_a { term } else { 0.0 },
            if big_as { term } else { 0.0 },
            if !big_a && !big_as { term } else { 0.0 },
        ]
    });
    Ok(PartitionSums {
        total,
        large_a,
        large_a_shift,
        star,
        x,
        z,
        shift,
        cutoff_exp,
    })
}

/// The star part of the partition grouped by v = gcd(a, a_shift); v
/// always divides the shift, and the groups recombine exactly to `star`.
pub fn gcd_split_sums(
    table: &EigenvalueTable,
    shift: i64,
    x: f64,
    z: f64,
    cutoff_exp: f64,
) -> Result<Vec<(u64, f64)>> {
    if !(z >= 2.0) {
        return Err(Error::Argument(format!("z must be >= 2, got {z}")));
    }
    let (lo, hi) = check_shift_range(table, shift, x)?;
    let factors = FactorTable::new(table.limit());
    let threshold = x.powf(cutoff_exp);
    let divisors: Vec<u64> = (1..=shift.unsigned_abs())
        .filter(|d| shift.unsigned_abs() % d == 0)
        .collect();
    let mut sums: Vec<Neumaier> = vec![Neumaier::default(); divisors.len()];
    for n in lo..=hi {
        let m = n.wrapping_add_signed(shift);
        let a = factors.smooth_part(n, z);
        let a_shift = factors.smooth_part(m, z);
        if a as f64 > threshold || a_shift as f64 > threshold {
            continue;
        }
        let v = primes::gcd(a, a_shift);
        let idx = divisors.iter().position(|&d| d == v).ok_or_else(|| {
            Error::Consistency(format!("gcd {v} of smooth parts does not divide the shift"))
        })?;
        sums[idx].add((table.lambda(n) * table.lambda(m)).abs());
    }
    Ok(divisors
        .into_iter()
        .zip(sums.into_iter().map(|s| s.total()))
        .collect())
}

/// Sifting sum fed to the double sieve: over b <= x/a on the line
/// `a_shift * b_shift = a b + shift` with b and b_shift free of primes
/// p <= z, p not dividing 6*shift, weight eta(b).
pub fn sifting_sum(
    eta: &EtaFunction,
    a: u64,
    a_shift: u64,
    shift: i64,
    x: f64,
    z: f64,
) -> Result<f64> {
    if a == 0 || a_shift == 0 {
        return Err(Error::Argument("cofactors must be positive".into()));
    }
    if primes::gcd(a, a_shift) != 1 {
        return Err(Error::Argument(format!(
            "cofactors must be coprime, got ({a}, {a_shift})"
        )));
    }
    if shift == 0 {
        return Err(Error::Argument("shift must be non-zero".into()));
    }
    let sieve_primes: Vec<u64> = primes::primes_up_to(z.max(0.0) as u64)
        .into_iter()
        .filter(|&p| (6 * shift.unsigned_abs()) % p != 0)
        .collect();
    let b_max = (x / a as f64).floor() as u64;
    let mut acc = Neumaier::default();
    for b in 1..=b_max.min(eta.limit()) {
        let n = a * b;
        let m = n as i64 + shift;
        if m < 1 || m as u64 % a_shift != 0 {
            continue;
        }
        let b_shift = m as u64 / a_shift;
        if sieve_primes
            .iter()
            .any(|&p| b % p == 0 || b_shift % p == 0)
        {
            continue;
        }
        acc.add(eta.value(b));
    }
    Ok(acc.total())
}

/// A progression sum, its calibrated main term, and their difference.
#[derive(Clone, Copy, Debug)]
pub struct ProgressionSum {
    pub sum: f64,
    pub main: f64,
    pub error: f64,
    pub solvable: bool,
}

/// `sum eta(d c)` over c <= x/(a d) on the line
/// `a_shift d_shift c_shift = a d c + shift`, against the main term
/// `(theta / zeta(2)) L^ lambda^2(d) / phi(a_shift d_shift) * x / (a d)`.
///
/// The line is treated as the congruence
/// `c = -shift * (a d)^{-1} mod a_shift d_shift`; when the shift shares a
/// factor with the modulus that residue is not coprime to the modulus,
/// no admissible progression exists, and the zero sum is returned with
/// `solvable = false`.
#[allow(clippy::too_many_arguments)]
pub fn progression_sum(
    eta: &EtaFunction,
    calib: &Calibration,
    a: u64,
    a_shift: u64,
    d: u64,
    d_shift: u64,
    shift: i64,
    x: f64,
) -> Result<ProgressionSum> {
    if shift == 0 {
        return Err(Error::Argument("shift must be non-zero".into()));
    }
    let ad = a
        .checked_mul(d)
        .ok_or_else(|| Error::Argument("a*d overflows".into()))?;
    let modulus = a_shift
        .checked_mul(d_shift)
        .ok_or_else(|| Error::Argument("a_shift*d_shift overflows".into()))?;
    if ad == 0 || modulus == 0 {
        return Err(Error::Argument("cofactors must be positive".into()));
    }
    if primes::gcd(ad, modulus) != 1 {
        return Err(Error::Argument(format!(
            "(a d, a_shift d_shift) = ({ad}, {modulus}) not coprime"
        )));
    }
    if primes::gcd(modulus, shift.unsigned_abs()) != 1 {
        return Ok(ProgressionSum {
            sum: 0.0,
            main: 0.0,
            error: 0.0,
            solvable: false,
        });
    }

    let c_max = (x / ad as f64).floor() as u64;
    let residue = if modulus == 1 {
        0
    } else {
        let inv = primes::mod_inverse(ad % modulus, modulus).expect("coprime by check");
        let s = (-shift).rem_euclid(modulus as i64) as u64;
        (s as u128 * inv as u128 % modulus as u128) as u64
    };
    let mut acc = Neumaier::default();
    let mut c = if residue == 0 { modulus } else { residue };
    if modulus == 1 {
        c = 1;
    }
    while c <= c_max {
        let n = (ad * c) as i64 + shift;
        if n >= 1 {
            acc.add(eta.try_value(d * c)?);
        }
        c += modulus;
    }
    let sum = acc.total();

    let table = eta.table();
    let mut theta = calib.gamma;
    for (p, _) in primes::factorize(a_shift) {
        if p == 2 || p == 3 {
            theta /= 1.0 + table.try_lambda(p)?.powi(2) / p as f64;
        }
    }
    for (p, _) in primes::factorize(modulus) {
        if p != 2 && p != 3 {
            theta *= 1.0 - table.try_lambda(p)?.powi(2) / p as f64;
        }
    }
    let ld = table.try_lambda(d)?;
    let main = theta / ZETA2 * calib.l_hat * ld * ld / primes::euler_phi(modulus) as f64 * x
        / ad as f64;
    Ok(ProgressionSum {
        sum,
        main,
        error: sum - main,
        solvable: true,
    })
}

/// One row of the decay report.
#[derive(Clone, Copy, Debug)]
pub struct DecayRow {
    pub x: f64,
    pub sum: f64,
    pub per_x: f64,
    /// `sum * (log x)^{1/7} / x`.
    pub normalized: f64,
}

pub fn decay_table(table: &EigenvalueTable, shift: i64, xs: &[f64]) -> Result<Vec<DecayRow>> {
    xs.iter()
        .map(|&x| {
            let sum = shifted_sum(table, shift, x)?;
            Ok(DecayRow {
                x,
                sum,
                per_x: sum / x,
                normalized: sum * x.ln().powf(DECAY_NORM_EXP) / x,
            })
        })
        .collect()
}

/// `S_shift(x) / (x * L^ * M(x))`: the shifted sum against its main-term
/// model. Bounded ratios across an x-grid are the empirical content of
/// the sieve bound.
pub fn main_term_ratio(
    table: &EigenvalueTable,
    calib: &Calibration,
    shift: i64,
    x: f64,
    c: f64,
) -> Result<f64> {
    let s = shifted_sum(table, shift, x)?;
    let m = eulerprod::main_term_factor(table, x, c)?;
    Ok(s / (x * calib.l_hat * m.m))
}

/// Contribution of b with a square prime factor above z on the shifted
/// line: `sum lambda^2(b)` over b <= x/a with `a_shift | a b + shift`,
/// `b_shift >= 1`, and some p > z with p^2 | b.
pub fn square_full_remainder(
    eta: &EtaFunction,
    a: u64,
    a_shift: u64,
    shift: i64,
    x: f64,
    z: f64,
) -> Result<f64> {
    if a == 0 || a_shift == 0 {
        return Err(Error::Argument("cofactors must be positive".into()));
    }
    if primes::gcd(a, a_shift) != 1 {
        return Err(Error::Argument(format!(
            "cofactors must be coprime, got ({a}, {a_shift})"
        )));
    }
    let table = eta.table();
    let b_max = (x / a as f64).floor() as u64;
    if z * z > b_max as f64 {
        return Ok(0.0); // no b <= x/a can contain p^2 with p > z
    }
    let mut acc = Neumaier::default();
    for b in 1..=b_max.min(eta.limit()) {
        let m = (a * b) as i64 + shift;
        if m < 1 || m as u64 % a_shift != 0 {
            continue;
        }
        if eta.factors().has_square_factor_above(b, z) {
            let l = table.lambda(b);
            acc.add(l * l);
        }
    }
    Ok(acc.total())
}
