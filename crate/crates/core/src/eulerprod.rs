//! Partial symmetric-power Euler products, the main-term factor M(x), the
//! polynomial majorants of |y| that drive its saving, Hecke power
//! identities, and the correction factors linking the eta-series to the
//! Rankin-Selberg series.

use crate::detsum::{block_sum, Neumaier};
use crate::error::{Error, Result};
use crate::hecke::EigenvalueTable;
use crate::primes;
use num_complex::Complex64;

pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Default truncation for the correction-factor product; its factors are
/// 1 + O(p^-2), so the tail beyond 10^4 is below 1e-3.
pub const GAMMA_CUTOFF: u64 = 10_000;

/// Truncated Euler product of a symmetric power L-function at s = 1.
#[derive(Clone, Copy, Debug)]
pub struct PartialEulerProduct {
    pub power: u8,
    pub cutoff: f64,
    pub value: f64,
    pub log_value: f64,
}

/// `prod_{p<=z} prod_{j=0}^m (1 - alpha^{m-j} beta^j / p)^{-1}` with the
/// local parameters of the table. The product over j pairs conjugates, so
/// the value is real; any imaginary residue is checked against 1e-9 and
/// discarded.
pub fn partial_sym_power(table: &EigenvalueTable, m: u8, z: f64) -> Result<PartialEulerProduct> {
    if !(1..=8).contains(&m) {
        return Err(Error::Argument(format!("power must be 1..=8, got {m}")));
    }
    if z > table.limit() as f64 {
        return Err(Error::Range(format!(
            "cutoff {z} exceeds table limit {}",
            table.limit()
        )));
    }
    let mut log_acc = Neumaier::default();
    for p in primes::primes_up_to(z.max(0.0) as u64) {
        let lp = table.local_params(p)?;
        let inv_p = 1.0 / p as f64;
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..=m {
            let gamma = lp.alpha.powi((m - j) as i32) * lp.beta.powi(j as i32);
            prod *= Complex64::new(1.0, 0.0) - gamma * inv_p;
        }
        if prod.norm() < 1e-300 {
            return Err(Error::Singularity(format!(
                "local factor vanishes at p = {p} for power {m}"
            )));
        }
        if prod.im.abs() > 1e-9 * (1.0 + prod.re.abs()) {
            return Err(Error::Consistency(format!(
                "local factor at p = {p} has imaginary residue {}",
                prod.im
            )));
        }
        log_acc.add(-prod.re.ln());
    }
    let log_value = log_acc.total();
    Ok(PartialEulerProduct {
        power: m,
        cutoff: z,
        value: log_value.exp(),
        log_value,
    })
}

/// The main-term factor and its companion constants.
#[derive(Clone, Copy, Debug)]
pub struct MainTermFactors {
    /// `prod_{p<=z} (1 - (1 - |lambda(p)|)^2 / p)` at `z = x^{1/(c log log x)}`.
    pub m: f64,
    pub z: f64,
    pub gamma: f64,
    pub theta: f64,
    pub zeta2: f64,
}

fn m_product(table: &EigenvalueTable, z: f64) -> Result<f64> {
    let mut log_acc = Neumaier::default();
    for p in primes::primes_up_to(z as u64) {
        let l = table.lambda(p).abs();
        let factor = 1.0 - (1.0 - l) * (1.0 - l) / p as f64;
        if factor <= 0.0 || factor > 1.0 {
            return Err(Error::Consistency(format!(
                "main-term factor {factor} at p = {p} outside (0, 1]"
            )));
        }
        log_acc.add(factor.ln());
    }
    Ok(log_acc.total().exp())
}

/// Main-term factor at `z = x^{1/s}`, `s = c log log x`.
pub fn main_term_factor(table: &EigenvalueTable, x: f64, c: f64) -> Result<MainTermFactors> {
    if !(x >= 16.0) {
        return Err(Error::Argument(format!("x must be >= 16, got {x}")));
    }
    if !(c > 0.0) {
        return Err(Error::Argument(format!("c must be > 0, got {c}")));
    }
    let s = c * x.ln().ln();
    let z = (x.ln() / s).exp();
    if z < 2.0 {
        return Err(Error::Degenerate(format!(
            "z = x^(1/(c log log x)) = {z} fell below 2"
        )));
    }
    if z > table.limit() as f64 {
        return Err(Error::Range(format!(
            "z = {z} exceeds table limit {}",
            table.limit()
        )));
    }
    let m = m_product(table, z)?;
    let gamma = gamma_correction(table, GAMMA_CUTOFF.min(table.limit()))?.value;
    Ok(MainTermFactors {
        m,
        z,
        gamma,
        theta: gamma, // modulus-1 specialisation; see theta_factor
        zeta2: ZETA2,
    })
}

/// Margin of the sextic majorant:
/// `1 + (y^2-1)/2 + a (y^2-1)^2 + b (y^2-1)^3 - |y|`.
pub fn sextic_abs_bound_margin(a: f64, b: f64, y: f64) -> f64 {
    let t = y * y - 1.0;
    1.0 + 0.5 * t + a * t * t + b * t * t * t - y.abs()
}

/// The reference coefficients for the sextic majorant, valid on all of R.
pub const SEXTIC_A: f64 = -1.0 / 9.0;
pub const SEXTIC_B: f64 = 1.0 / 36.0;

/// Margin of the quartic majorant
/// `17/18 + 11/18 (y^2-1) - 1/18 (y^4-2) - |y|`, valid on |y| <= 2.
pub fn quartic_abs_bound_margin(y: f64) -> Result<f64> {
    if y.abs() > 2.0 {
        return Err(Error::Domain(format!("|y| must be <= 2, got {y}")));
    }
    let y2 = y * y;
    Ok(17.0 / 18.0 + 11.0 / 18.0 * (y2 - 1.0) - (y2 * y2 - 2.0) / 18.0 - y.abs())
}

/// Residuals of the power identities
/// `lambda^2 - 1 - lambda(p^2)`,
/// `lambda^4 - 2 - lambda(p^4) - 3 lambda(p^2)`,
/// `lambda^6 - 5 - lambda(p^6) - 5 lambda(p^4) - 9 lambda(p^2)`.
/// Prime powers beyond the table limit are filled by the Hecke recursion.
pub fn hecke_power_residuals(table: &EigenvalueTable, p: u64) -> Result<(f64, f64, f64)> {
    let l = table.try_lambda(p)?;
    let l2 = table.lambda_prime_power(p, 2)?;
    let l4 = table.lambda_prime_power(p, 4)?;
    let l6 = table.lambda_prime_power(p, 6)?;
    let r2 = l * l - 1.0 - l2;
    let r4 = l.powi(4) - 2.0 - l4 - 3.0 * l2;
    let r6 = l.powi(6) - 5.0 - l6 - 5.0 * l4 - 9.0 * l2;
    Ok((r2, r4, r6))
}

/// Bound on the main-term factor through symmetric-power partial products.
#[derive(Clone, Copy, Debug)]
pub struct SymPowerBound {
    /// `prod_{p<=z} (1 - (1-|lambda(p)|)^2 / p)`.
    pub m: f64,
    /// `(L6 / (L2 L4^2 (log z)^3))^{1/18}`.
    pub bound: f64,
    /// Minimum over p <= z of the per-prime inequality margin
    /// `-3/18 + 11/18 (l^2-1) - 7/18 (l^4-2) + 1/18 (l^6-5) + (1-|l|)^2`.
    pub min_prime_margin: f64,
}

pub fn sym_power_bound_check(table: &EigenvalueTable, z: f64) -> Result<SymPowerBound> {
    if !(z >= 2.0) {
        return Err(Error::Argument(format!("z must be >= 2, got {z}")));
    }
    let m = m_product(table, z)?;
    let l2 = partial_sym_power(table, 2, z)?;
    let l4 = partial_sym_power(table, 4, z)?;
    let l6 = partial_sym_power(table, 6, z)?;
    let log_bound =
        (l6.log_value - l2.log_value - 2.0 * l4.log_value - 3.0 * z.ln().ln()) / 18.0;
    let bound = log_bound.exp();

    let mut min_margin = f64::INFINITY;
    for p in primes::primes_up_to(z as u64) {
        let l = table.lambda(p);
        let l2v = l * l;
        let rhs = -3.0 / 18.0 + 11.0 / 18.0 * (l2v - 1.0) - 7.0 / 18.0 * (l2v * l2v - 2.0)
            + (l2v * l2v * l2v - 5.0) / 18.0;
        let margin = rhs + (1.0 - l.abs()) * (1.0 - l.abs());
        if margin < min_margin {
            min_margin = margin;
        }
    }
    Ok(SymPowerBound {
        m,
        bound,
        min_prime_margin: min_margin,
    })
}

/// Correction factor linking the eta-Dirichlet series to the
/// Rankin-Selberg series, evaluated at s = 1 by a truncated product.
#[derive(Clone, Copy, Debug)]
pub struct GammaCorrection {
    pub value: f64,
    pub cutoff: u64,
    /// Heuristic size of the neglected tail `sum_{p > cutoff} 2/p^2`.
    pub tail_estimate: f64,
}

/// Lower and upper consistency brackets for the correction factor.
pub const GAMMA_LOWER: f64 = 3.0 / (5.0 * std::f64::consts::PI * std::f64::consts::PI);
pub const GAMMA_UPPER: f64 = 15.0;

pub fn gamma_correction(table: &EigenvalueTable, prime_cutoff: u64) -> Result<GammaCorrection> {
    if prime_cutoff > table.limit() {
        return Err(Error::Range(format!(
            "cutoff {prime_cutoff} exceeds table limit {}",
            table.limit()
        )));
    }
    let mut acc = Neumaier::default();
    for p in primes::primes_up_to(prime_cutoff) {
        let pf = p as f64;
        let l2 = table.lambda(p).powi(2);
        let factor = if p == 2 || p == 3 {
            let l4 = l2 * l2;
            1.0 - (pf * pf + pf - (2.0 * pf * pf - pf - 1.0) * l2 + (pf * pf - pf) * l4)
                / (pf.powi(4) * (1.0 + 1.0 / pf))
        } else {
            1.0 + (2.0 * pf * l2 - pf - 1.0)
                / (pf.powi(3) * (1.0 - l2 / pf) * (1.0 + 1.0 / pf))
        };
        if factor <= 0.0 {
            return Err(Error::Consistency(format!(
                "correction factor {factor} at p = {p} is not positive"
            )));
        }
        acc.add(factor.ln());
    }
    let value = acc.total().exp();
    if value <= GAMMA_LOWER || value >= GAMMA_UPPER {
        return Err(Error::Consistency(format!(
            "correction factor {value} outside ({GAMMA_LOWER}, {GAMMA_UPPER}); \
             table or normalization bug"
        )));
    }
    let cf = prime_cutoff as f64;
    Ok(GammaCorrection {
        value,
        cutoff: prime_cutoff,
        tail_estimate: 2.0 / (cf * cf.ln().max(1.0)),
    })
}

/// `theta(q) = gamma * prod_{p|q, p|6} (1 + lambda^2/p)^{-1}
///                   * prod_{p|q, p not|6} (1 - lambda^2/p)`.
pub fn theta_factor(table: &EigenvalueTable, q: u64) -> Result<f64> {
    let gamma = gamma_correction(table, GAMMA_CUTOFF.min(table.limit()))?.value;
    theta_factor_with_gamma(table, q, gamma)
}

pub fn theta_factor_with_gamma(table: &EigenvalueTable, q: u64, gamma: f64) -> Result<f64> {
    let mut theta = gamma;
    for (p, _) in primes::factorize(q) {
        let l2 = table.try_lambda(p)?.powi(2);
        if p == 2 || p == 3 {
            theta /= 1.0 + l2 / p as f64;
        } else {
            theta *= 1.0 - l2 / p as f64;
        }
    }
    Ok(theta)
}

/// Fourth moment of the eigenvalues against its symmetric-power bound.
#[derive(Clone, Copy, Debug)]
pub struct FourthMoment {
    pub sum: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `sum_{n<=x} lambda^4(n)` versus `x (log x)^2 L4(u,x) L2(u,x)^3`.
pub fn fourth_moment_bound(table: &EigenvalueTable, x: f64) -> Result<FourthMoment> {
    if x > table.limit() as f64 {
        return Err(Error::Range(format!(
            "x = {x} exceeds table limit {}",
            table.limit()
        )));
    }
    let xi = x.floor() as u64;
    let sum = block_sum(1, xi, |n| table.lambda(n).powi(4));
    let l2 = partial_sym_power(table, 2, x)?;
    let l4 = partial_sym_power(table, 4, x)?;
    let bound = x * x.ln().powi(2) * l4.value * l2.value.powi(3);
    Ok(FourthMoment {
        sum,
        bound,
        ratio: sum / bound,
    })
}

/// One candidate coefficient pair for the sextic majorant.
#[derive(Clone, Copy, Debug)]
pub struct PairScanRow {
    pub a: f64,
    pub b: f64,
    pub min_margin: f64,
    pub admissible: bool,
    /// The log-power saving this pair would deliver: `-2(a + b)`.
    pub saving: f64,
}

/// Minimum margin of the sextic majorant on a dense symmetric grid plus
/// far-field points; the margin is even in y so only y >= 0 is scanned.
pub fn sextic_min_margin(a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return f64::NEG_INFINITY; // cubic term must dominate at infinity
    }
    let mut min = f64::INFINITY;
    let steps = 40_000usize;
    for i in 0..=steps {
        let y = 4.0 * i as f64 / steps as f64;
        min = min.min(sextic_abs_bound_margin(a, b, y));
    }
    for y in [10.0, 100.0, 1000.0] {
        min = min.min(sextic_abs_bound_margin(a, b, y));
    }
    min
}

/// Grid scan over candidate (a, b), including the reference pair, ranked
/// by saving among admissible rows. Deterministic: fixed grids, fixed
/// refinement schedule.
pub fn admissible_pair_scan() -> Vec<PairScanRow> {
    let mut rows = Vec::new();
    let push = |a: f64, b: f64, rows: &mut Vec<PairScanRow>| {
        let min_margin = sextic_min_margin(a, b);
        rows.push(PairScanRow {
            a,
            b,
            min_margin,
            admissible: min_margin >= -1e-12,
            saving: -2.0 * (a + b),
        });
    };
    push(SEXTIC_A, SEXTIC_B, &mut rows);
    // coarse grid
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..=26 {
        let a = -0.13 + 0.005 * i as f64;
        for j in 1..=24 {
            let b = 0.0025 * j as f64;
            let m = sextic_min_margin(a, b);
            if m >= -1e-12 {
                let saving = -2.0 * (a + b);
                if best.map_or(true, |(_, _, s)| saving > s) {
                    best = Some((a, b, saving));
                }
            }
        }
    }
    // two local refinement rounds around the best coarse point
    if let Some((mut a0, mut b0, _)) = best {
        let mut step_a = 0.005;
        let mut step_b = 0.0025;
        for _ in 0..2 {
            let mut local = (a0, b0, -2.0 * (a0 + b0));
            for i in -4i32..=4 {
                for j in -4i32..=4 {
                    let a = a0 + step_a / 4.0 * i as f64;
                    let b = b0 + step_b / 4.0 * j as f64;
                    if b <= 0.0 {
                        continue;
                    }
                    if sextic_min_margin(a, b) >= -1e-12 {
                        let saving = -2.0 * (a + b);
                        if saving > local.2 {
                            local = (a, b, saving);
                        }
                    }
                }
            }
            (a0, b0) = (local.0, local.1);
            step_a /= 4.0;
            step_b /= 4.0;
        }
        push(a0, b0, &mut rows);
    }
    rows
}
