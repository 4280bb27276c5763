//! Upper-bound linear sieve weights and the coupled bilinear form.
//!
//! The weights are the beta = 2 Rosser-Iwaniec upper set: signed Moebius
//! values on the support
//!
//! `D+ = { d = p1...pr, p1 > ... > pr : p1...p_{m-1} p_m^3 < D for every
//! odd m <= r }`,
//!
//! which majorizes the coprimality indicator,
//! `sum_{d | (n, P(z))} xi_d >= [ (n, P(z)) = 1 ]` for every n.

use crate::error::{Error, Result};
use crate::hecke::EigenvalueTable;
use crate::primes;

const SUPPORT_CAP: usize = 1 << 22;

/// The sifting range: primes up to z, minus an excluded set.
#[derive(Clone, Debug)]
pub struct SieveContext {
    z: f64,
    excluded: Vec<u64>,
    primes: Vec<u64>,
}

/// Primes up to z excluding the divisors of `exclude_divisors_of`.
pub fn make_context(z: f64, exclude_divisors_of: u64) -> SieveContext {
    let excluded: Vec<u64> = primes::factorize(exclude_divisors_of.max(1))
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let primes = primes::primes_up_to(z as u64)
        .into_iter()
        .filter(|p| !excluded.contains(p))
        .collect();
    SieveContext {
        z,
        excluded,
        primes,
    }
}

impl SieveContext {
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn excluded(&self) -> &[u64] {
        &self.excluded
    }

    /// Product of the context primes (saturating at u128::MAX).
    pub fn primorial(&self) -> u128 {
        self.primes
            .iter()
            .fold(1u128, |acc, &p| acc.saturating_mul(p as u128))
    }

    /// True when no context prime divides n.
    pub fn coprime(&self, n: u64) -> bool {
        self.primes.iter().all(|&p| n % p != 0)
    }
}

/// Level-D upper-bound weights `d -> xi_d` on squarefree d | P(z).
#[derive(Clone, Debug)]
pub struct SieveWeights {
    primes: Vec<u64>,
    level: f64,
    /// (d, xi_d) with xi = mu(d), ascending in d; d = 1 always present.
    support: Vec<(u64, i8)>,
}

/// Weights of level D on a context.
pub fn linear_sieve_weights(ctx: &SieveContext, level: f64) -> Result<SieveWeights> {
    if !(level > 1.0) {
        return Err(Error::Argument(format!("level must be > 1, got {level}")));
    }
    // Descending primes so the D+ prefix conditions prune the DFS.
    let desc: Vec<u64> = ctx.primes.iter().rev().copied().collect();
    let mut support: Vec<(u64, i8)> = Vec::new();

    fn extend(
        desc: &[u64],
        start: usize,
        prefix: u128,
        depth: u32,
        level: f64,
        support: &mut Vec<(u64, i8)>,
    ) -> Result<()> {
        if support.len() >= SUPPORT_CAP {
            return Err(Error::Capacity(format!(
                "sieve support exceeds {SUPPORT_CAP} entries"
            )));
        }
        let xi = if depth % 2 == 0 { 1i8 } else { -1 };
        let d = u64::try_from(prefix)
            .map_err(|_| Error::Capacity("support element exceeds u64".into()))?;
        support.push((d, xi));
        for i in start..desc.len() {
            let p = desc[i] as u128;
            // At odd positions m the prefix condition p1..p_{m-1} p_m^3 < D
            // must hold; even positions are unconstrained.
            if depth % 2 == 0 {
                let check = prefix
                    .saturating_mul(p)
                    .saturating_mul(p)
                    .saturating_mul(p);
                if check as f64 >= level {
                    continue;
                }
            }
            extend(desc, i + 1, prefix * p, depth + 1, level, support)?;
        }
        Ok(())
    }
    extend(&desc, 0, 1, 0, level, &mut support)?;
    support.sort_unstable_by_key(|&(d, _)| d);
    Ok(SieveWeights {
        primes: ctx.primes.clone(),
        level,
        support,
    })
}

impl SieveWeights {
    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn support(&self) -> &[(u64, i8)] {
        &self.support
    }

    pub fn xi(&self, d: u64) -> i8 {
        match self.support.binary_search_by_key(&d, |&(d, _)| d) {
            Ok(i) => self.support[i].1,
            Err(_) => 0,
        }
    }

    /// `sum_{d | (n, P(z))} xi_d`.
    pub fn divisor_sum(&self, n: u64) -> i64 {
        self.support
            .iter()
            .filter(|&&(d, _)| n % d == 0)
            .map(|&(_, xi)| xi as i64)
            .sum()
    }

    /// `divisor_sum(n) - [ (n, P(z)) = 1 ]`; the upper-bound property of
    /// the weight set is exactly that this is never negative.
    pub fn upper_bound_residual(&self, n: u64) -> i64 {
        let coprime = self.primes.iter().all(|&p| n % p != 0);
        self.divisor_sum(n) - i64::from(coprime)
    }

    /// True when no truncation condition binds, i.e. the support is all
    /// of the divisors of P(z) and the weights sift exactly. Note this
    /// needs the level above the worst odd-prefix product (for
    /// {2, 3, 5} that is 5^3 = 125), not merely above the primorial.
    pub fn is_full_moebius(&self) -> bool {
        self.support.len() == 1usize << self.primes.len()
    }
}

/// A sieve density: values g(p) in [0, 1) at context primes, extended
/// multiplicatively to squarefree d.
#[derive(Clone, Debug)]
pub struct DensityFunction {
    pairs: Vec<(u64, f64)>,
}

impl DensityFunction {
    pub fn from_fn(ctx: &SieveContext, f: impl Fn(u64) -> f64) -> Self {
        DensityFunction {
            pairs: ctx.primes.iter().map(|&p| (p, f(p))).collect(),
        }
    }

    /// The density `lambda^2(p) / p` vanishing on divisors of
    /// `shift_cofactor` (the smooth cofactor of n + l).
    pub fn main_density(
        table: &EigenvalueTable,
        ctx: &SieveContext,
        shift_cofactor: u64,
    ) -> Self {
        DensityFunction {
            pairs: ctx
                .primes
                .iter()
                .map(|&p| {
                    let g = if shift_cofactor % p == 0 {
                        0.0
                    } else {
                        let l = table.lambda(p);
                        l * l / p as f64
                    };
                    (p, g)
                })
                .collect(),
        }
    }

    /// The companion density for the shifted variable:
    /// `(1 - lambda^2(p)/p) / (p - 1)` away from both cofactors, `1/p` on
    /// divisors of `shift_cofactor`, zero on divisors of `cofactor`.
    pub fn shifted_density(
        table: &EigenvalueTable,
        ctx: &SieveContext,
        cofactor: u64,
        shift_cofactor: u64,
    ) -> Self {
        DensityFunction {
            pairs: ctx
                .primes
                .iter()
                .map(|&p| {
                    let g = if cofactor % p == 0 {
                        0.0
                    } else if shift_cofactor % p == 0 {
                        1.0 / p as f64
                    } else {
                        let l = table.lambda(p);
                        (1.0 - l * l / p as f64) / (p as f64 - 1.0)
                    };
                    (p, g)
                })
                .collect(),
        }
    }

    pub fn at(&self, p: u64) -> f64 {
        match self.pairs.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.pairs[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn pairs(&self) -> &[(u64, f64)] {
        &self.pairs
    }

    /// Multiplicative extension to squarefree d over the context primes.
    pub fn eval_squarefree(&self, d: u64) -> f64 {
        let mut g = 1.0;
        let mut rest = d;
        for &(p, gp) in &self.pairs {
            if rest % p == 0 {
                g *= gp;
                rest /= p;
            }
            if rest == 1 {
                break;
            }
        }
        g
    }
}

/// The coupled bilinear form
/// `sum_{d1} xi'_{d1} g'(d1) sum_{d2, (d1,d2)=1} xi''_{d2} g''(d2)`.
pub fn coupled_bilinear_form(
    w1: &SieveWeights,
    w2: &SieveWeights,
    g1: &DensityFunction,
    g2: &DensityFunction,
) -> f64 {
    let mut outer = 0.0;
    for &(d1, xi1) in &w1.support {
        let gv1 = g1.eval_squarefree(d1);
        if gv1 == 0.0 && d1 != 1 {
            continue;
        }
        let mut inner = 0.0;
        for &(d2, xi2) in &w2.support {
            if primes::gcd(d1, d2) == 1 {
                inner += xi2 as f64 * g2.eval_squarefree(d2);
            }
        }
        outer += xi1 as f64 * gv1 * inner;
    }
    outer
}

/// Factors of the bound `C V' V''` on the coupled bilinear form.
#[derive(Clone, Copy, Debug)]
pub struct CoupledBound {
    pub c: f64,
    pub v1: f64,
    pub v2: f64,
    pub product: f64,
}

/// `V' = prod_{p < D'} (1 - g'(p))`, `V'' = prod_{p < D''} (1 - g''(p))`,
/// `C = prod (1 + h' h''(p))` with `h = g / (1 - g)`, over context primes.
pub fn coupled_sieve_bound(
    ctx: &SieveContext,
    g1: &DensityFunction,
    g2: &DensityFunction,
    level1: f64,
    level2: f64,
) -> Result<CoupledBound> {
    let mut v1 = 1.0;
    let mut v2 = 1.0;
    let mut c = 1.0;
    for &p in &ctx.primes {
        let a = g1.at(p);
        let b = g2.at(p);
        if a == 1.0 || b == 1.0 {
            return Err(Error::Singularity(format!(
                "density equals 1 at p = {p}; h(p) undefined"
            )));
        }
        if a > 1.0 || b > 1.0 {
            return Err(Error::Argument(format!(
                "density exceeds 1 at p = {p}"
            )));
        }
        if (p as f64) < level1 {
            v1 *= 1.0 - a;
        }
        if (p as f64) < level2 {
            v2 *= 1.0 - b;
        }
        c *= 1.0 + (a * b) / ((1.0 - a) * (1.0 - b));
    }
    Ok(CoupledBound {
        c,
        v1,
        v2,
        product: c * v1 * v2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_examples() {
        let c = make_context(5.0, 1);
        assert_eq!(c.primes(), &[2, 3, 5]);
        assert_eq!(c.primorial(), 30);

        let c = make_context(5.0, 6);
        assert_eq!(c.primes(), &[5]);
        assert_eq!(c.primorial(), 5);

        let c = make_context(7.0, 6);
        assert_eq!(c.primes(), &[5, 7]);
        assert_eq!(c.primorial(), 35);
    }

    #[test]
    fn weight_support_examples() {
        let ctx = make_context(5.0, 1);
        let w = linear_sieve_weights(&ctx, 10.0).unwrap();
        assert_eq!(w.support(), &[(1, 1), (2, -1)]);

        let w = linear_sieve_weights(&ctx, 1000.0).unwrap();
        let expect: Vec<(u64, i8)> = vec![
            (1, 1),
            (2, -1),
            (3, -1),
            (5, -1),
            (6, 1),
            (10, 1),
            (15, 1),
            (30, -1),
        ];
        assert_eq!(w.support(), expect.as_slice());
    }

    #[test]
    fn full_moebius_sifts_exactly() {
        let ctx = make_context(7.0, 1);
        let w = linear_sieve_weights(&ctx, 1e9).unwrap();
        for n in 1..=2000u64 {
            let s = w.divisor_sum(n);
            let coprime = ctx.coprime(n);
            assert_eq!(s, i64::from(coprime), "n = {n}");
        }
    }

    #[test]
    fn residual_examples() {
        let ctx = make_context(5.0, 1);
        let w = linear_sieve_weights(&ctx, 10.0).unwrap();
        assert_eq!(w.upper_bound_residual(7), 0); // coprime
        assert_eq!(w.upper_bound_residual(2), 0); // 1 - 1, indicator 0
        assert_eq!(w.upper_bound_residual(15), 1); // only d = 1 divides
    }

    #[test]
    fn residual_never_negative_small() {
        for z in [5.0, 7.0, 11.0, 13.0] {
            let ctx = make_context(z, 1);
            for level in [z, z * z, z * z * z, 1e6] {
                if level <= 1.0 {
                    continue;
                }
                let w = linear_sieve_weights(&ctx, level).unwrap();
                for n in 1..=3000u64 {
                    assert!(
                        w.upper_bound_residual(n) >= 0,
                        "z={z} D={level} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn xi_bounded_by_tau3() {
        let ctx = make_context(13.0, 1);
        let w = linear_sieve_weights(&ctx, 1e6).unwrap();
        for &(_, xi) in w.support() {
            assert!(xi.abs() <= 1); // |xi| <= 1 <= tau_3(d)
        }
        assert_eq!(w.xi(1), 1);
    }

    #[test]
    fn bilinear_examples() {
        let ctx = make_context(2.0, 1); // single prime {2}
        let w = linear_sieve_weights(&ctx, 1e9).unwrap();
        let zero = DensityFunction::from_fn(&ctx, |_| 0.0);
        assert_eq!(coupled_bilinear_form(&w, &w, &zero, &zero), 1.0);

        let half = DensityFunction::from_fn(&ctx, |_| 0.5);
        let v = coupled_bilinear_form(&w, &w, &half, &half);
        assert!(v.abs() < 1e-15); // 1 - 1/2 - 1/2

        // two-prime context against a direct 16-pair enumeration
        let ctx = make_context(3.0, 1);
        let w = linear_sieve_weights(&ctx, 1e9).unwrap();
        let g = DensityFunction::from_fn(&ctx, |p| 1.0 / (p as f64 + 1.0));
        let v = coupled_bilinear_form(&w, &w, &g, &g);
        let divs = [1u64, 2, 3, 6];
        let mu = |d: u64| match d {
            1 => 1.0,
            2 | 3 => -1.0,
            6 => 1.0,
            _ => unreachable!(),
        };
        let gd = |d: u64| g.eval_squarefree(d);
        let mut brute = 0.0;
        for &d1 in &divs {
            for &d2 in &divs {
                if primes::gcd(d1, d2) == 1 {
                    brute += mu(d1) * gd(d1) * mu(d2) * gd(d2);
                }
            }
        }
        assert!((v - brute).abs() < 1e-12, "{v} vs {brute}");
    }

    #[test]
    fn coupled_bound_examples() {
        let ctx = make_context(2.0, 1);
        let zero = DensityFunction::from_fn(&ctx, |_| 0.0);
        let b = coupled_sieve_bound(&ctx, &zero, &zero, 10.0, 10.0).unwrap();
        assert_eq!((b.c, b.v1, b.v2, b.product), (1.0, 1.0, 1.0, 1.0));

        let half = DensityFunction::from_fn(&ctx, |_| 0.5);
        let b = coupled_sieve_bound(&ctx, &half, &half, 10.0, 10.0).unwrap();
        assert_eq!(b.c, 2.0);
        assert_eq!(b.v1, 0.5);
        assert_eq!(b.v2, 0.5);
        assert_eq!(b.product, 0.5);

        let one = DensityFunction::from_fn(&ctx, |_| 1.0);
        assert!(matches!(
            coupled_sieve_bound(&ctx, &half, &one, 10.0, 10.0),
            Err(Error::Singularity(_))
        ));
    }
}
