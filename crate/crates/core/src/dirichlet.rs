//! Dirichlet characters, twisted eta-sums, and the orthogonality
//! reconstruction of progression sums, plus the smoothed dyadic sums that
//! sandwich a sharp-cutoff coefficient sum between mollified ones.

use crate::detsum::Neumaier;
use crate::error::{Error, Result};
use crate::eulerprod::{self, ZETA2};
use crate::primes;
use crate::shiftsums::{Calibration, EtaFunction};
use num_complex::Complex64;

/// Full character tables are materialized, so the modulus is capped.
pub const MODULUS_CAP: u64 = 3000;

/// The complete dual group mod q as value tables, principal character
/// first, then lexicographic in the generator-exponent tuple.
pub struct CharacterTable {
    modulus: u64,
    phi: usize,
    /// chars[i][n] = chi_i(n mod q); zero on residues sharing a factor.
    chars: Vec<Vec<Complex64>>,
}

/// One cyclic component of the unit group: discrete logs to a fixed
/// generator, taken modulo its order.
struct CyclicComponent {
    /// dlog[r] for residues r mod p^e coprime to p, usize::MAX otherwise
    dlog: Vec<usize>,
    order: usize,
    modulus: u64,
}

fn odd_prime_power_component(p: u64, e: u32) -> CyclicComponent {
    let pe = p.pow(e);
    let phi = (pe / p) * (p - 1);
    'outer: for g in 2..pe {
        if g % p == 0 {
            continue;
        }
        let mut dlog = vec![usize::MAX; pe as usize];
        let mut acc = 1u64;
        for k in 0..phi as usize {
            if dlog[acc as usize] != usize::MAX {
                continue 'outer; // orbit closed early: not a generator
            }
            dlog[acc as usize] = k;
            acc = acc * g % pe;
        }
        return CyclicComponent {
            dlog,
            order: phi as usize,
            modulus: pe,
        };
    }
    unreachable!("odd prime powers have primitive roots");
}

fn two_power_components(e: u32) -> Vec<CyclicComponent> {
    let pe = 2u64.pow(e);
    match e {
        0 => vec![],
        1 => vec![], // trivial unit group
        2 => {
            // generated by -1 = 3
            vec![CyclicComponent {
                dlog: vec![usize::MAX, 0, usize::MAX, 1],
                order: 2,
                modulus: 4,
            }]
        }
        _ => {
            // units = <-1> x <5>
            let half = pe as usize / 4;
            let mut sign = vec![usize::MAX; pe as usize];
            let mut dlog5 = vec![usize::MAX; pe as usize];
            let mut acc = 1u64;
            for k in 0..half {
                sign[acc as usize] = 0;
                dlog5[acc as usize] = k;
                let neg = (pe - acc) as usize;
                sign[neg] = 1;
                dlog5[neg] = k;
                acc = acc * 5 % pe;
            }
            vec![
                CyclicComponent {
                    dlog: sign,
                    order: 2,
                    modulus: pe,
                },
                CyclicComponent {
                    dlog: dlog5,
                    order: half,
                    modulus: pe,
                },
            ]
        }
    }
}

/// All phi(q) characters mod q.
pub fn characters_mod_q(q: u64) -> Result<CharacterTable> {
    if q < 1 {
        return Err(Error::Argument("modulus must be >= 1".into()));
    }
    if q > MODULUS_CAP {
        return Err(Error::Capacity(format!(
            "modulus {q} exceeds the table cap {MODULUS_CAP}"
        )));
    }
    let mut components: Vec<CyclicComponent> = Vec::new();
    for (p, e) in primes::factorize(q) {
        if p == 2 {
            components.extend(two_power_components(e));
        } else {
            components.push(odd_prime_power_component(p, e));
        }
    }
    let phi = components.iter().map(|c| c.order).product::<usize>().max(1);

    // roots[i][k] = e(k / order_i)
    let roots: Vec<Vec<Complex64>> = components
        .iter()
        .map(|c| {
            (0..c.order)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / c.order as f64;
                    Complex64::new(t.cos(), t.sin())
                })
                .collect()
        })
        .collect();

    let mut chars = Vec::with_capacity(phi);
    for index in 0..phi {
        // mixed-radix digits of the character index, first component most
        // significant so the principal character is index 0
        let mut digits = Vec::with_capacity(components.len());
        let mut rem = index;
        for c in components.iter().rev() {
            digits.push(rem % c.order);
            rem /= c.order;
        }
        digits.reverse();

        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        for n in 0..q {
            if primes::gcd(n, q) != 1 {
                continue;
            }
            let mut v = Complex64::new(1.0, 0.0);
            for ((c, &t), r) in components.iter().zip(&digits).zip(&roots) {
                let d = c.dlog[(n % c.modulus) as usize];
                v *= r[t * d % c.order];
            }
            values[n as usize] = v;
        }
        chars.push(values);
    }
    if q == 1 {
        chars = vec![vec![Complex64::new(1.0, 0.0)]];
    }
    Ok(CharacterTable {
        modulus: q,
        phi,
        chars,
    })
}

impl CharacterTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn count(&self) -> usize {
        self.phi
    }

    /// chi_i(n), for any n (reduced mod q).
    pub fn value(&self, i: usize, n: u64) -> Complex64 {
        self.chars[i][(n % self.modulus.max(1)) as usize]
    }

    pub fn values(&self, i: usize) -> &[Complex64] {
        &self.chars[i]
    }

    /// Max deviation of `sum_chi conj(chi(m)) chi(n)` from
    /// `phi(q) [n = m]` over coprime pairs.
    pub fn orthogonality_defect(&self) -> f64 {
        let q = self.modulus;
        let mut worst: f64 = 0.0;
        for m in 0..q.max(1) {
            if primes::gcd(m, q) != 1 {
                continue;
            }
            for n in 0..q.max(1) {
                if primes::gcd(n, q) != 1 {
                    continue;
                }
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..self.phi {
                    s += self.value(i, m).conj() * self.value(i, n);
                }
                let expect = if n == m { self.phi as f64 } else { 0.0 };
                worst = worst.max((s - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// `sum_{n<=x} chi(n) eta(n)`.
pub fn twisted_eta_sum(eta: &EtaFunction, table: &CharacterTable, i: usize, x: f64) -> Result<Complex64> {
    if x > eta.limit() as f64 {
        return Err(Error::Range(format!(
            "x = {x} exceeds eta table limit {}",
            eta.limit()
        )));
    }
    let hi = x.floor() as u64;
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for n in 1..=hi {
        let chi = table.value(i, n);
        if chi.re == 0.0 && chi.im == 0.0 {
            continue;
        }
        let e = eta.value(n);
        re.add(chi.re * e);
        im.add(chi.im * e);
    }
    Ok(Complex64::new(re.total(), im.total()))
}

/// A progression sum of eta, its orthogonality reconstruction, and its
/// calibrated main term.
#[derive(Clone, Copy, Debug)]
pub struct ProgressionEtaSum {
    pub direct: f64,
    pub via_orthogonality: f64,
    pub main: f64,
}

/// `sum_{n<=x, n = m mod q} eta(n)` three ways: directly, through the
/// character decomposition, and as the main term
/// `(theta(q)/zeta(2)) L^ x / phi(q)`.
pub fn progression_eta_sum(
    eta: &EtaFunction,
    calib: &Calibration,
    m: u64,
    q: u64,
    x: f64,
) -> Result<ProgressionEtaSum> {
    if q < 1 {
        return Err(Error::Argument("modulus must be >= 1".into()));
    }
    if primes::gcd(m % q.max(1), q) != 1 {
        return Err(Error::Argument(format!("({m}, {q}) must be coprime")));
    }
    if x > eta.limit() as f64 {
        return Err(Error::Range(format!(
            "x = {x} exceeds eta table limit {}",
            eta.limit()
        )));
    }
    let hi = x.floor() as u64;
    let mut acc = Neumaier::default();
    let mut n = m % q.max(1);
    if n == 0 {
        n = q;
    }
    while n <= hi {
        acc.add(eta.value(n));
        n += q;
    }
    let direct = acc.total();

    let table = characters_mod_q(q)?;
    let mut via = Complex64::new(0.0, 0.0);
    for i in 0..table.count() {
        via += table.value(i, m).conj() * twisted_eta_sum(eta, &table, i, x)?;
    }
    let phi = primes::euler_phi(q) as f64;
    let via = via.re / phi;

    let theta = eulerprod::theta_factor_with_gamma(eta.table(), q, calib.gamma)?;
    let main = theta / ZETA2 * calib.l_hat * x / phi;
    Ok(ProgressionEtaSum {
        direct,
        via_orthogonality: via,
        main,
    })
}

/// Sharp and mollified dyadic sums over [x, 2x].
#[derive(Clone, Copy, Debug)]
pub struct SmoothedSumResult {
    /// `sum_{x <= n <= 2x} a_n`.
    pub sharp: f64,
    /// Sum against a majorant: 1 on [x, 2x], supported [x-y, 2x+y].
    pub majorant: f64,
    /// Sum against a minorant: <= 1, supported [x, 2x].
    pub minorant: f64,
    /// `residue * x`, the expected dyadic main term.
    pub main: f64,
    /// `x^{3/4+eps} q^{1/2+eps}` with eps = 0.01.
    pub error_bound: f64,
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |u: f64| (-1.0 / u).exp();
    f(t) / (f(t) + f(1.0 - t))
}

/// Evaluate the sharp dyadic sum of non-negative coefficients and its
/// smooth majorant/minorant companions with transition width y.
pub fn smoothed_dyadic_sum(
    coeffs: impl Fn(u64) -> f64,
    x: f64,
    y: f64,
    residue: f64,
    q_bound: f64,
) -> Result<SmoothedSumResult> {
    if !(1.0 <= y && y <= x) {
        return Err(Error::Argument(format!(
            "need 1 <= y <= x, got y = {y}, x = {x}"
        )));
    }
    let majorant_fn = |u: f64| -> f64 {
        if u < x - y || u > 2.0 * x + y {
            0.0
        } else if u < x {
            smoothstep((u - (x - y)) / y)
        } else if u <= 2.0 * x {
            1.0
        } else {
            smoothstep(((2.0 * x + y) - u) / y)
        }
    };
    let w = y.min(x / 2.0);
    let minorant_fn = |u: f64| -> f64 {
        if u <= x || u >= 2.0 * x {
            0.0
        } else if u < x + w {
            smoothstep((u - x) / w)
        } else if u <= 2.0 * x - w {
            1.0
        } else {
            smoothstep((2.0 * x - u) / w)
        }
    };

    let lo = (x - y).max(1.0).floor() as u64;
    let hi = (2.0 * x + y).floor() as u64;
    let mut sharp = Neumaier::default();
    let mut major = Neumaier::default();
    let mut minor = Neumaier::default();
    for n in lo..=hi {
        let a = coeffs(n);
        let u = n as f64;
        if u >= x && u <= 2.0 * x {
            sharp.add(a);
        }
        let h = majorant_fn(u);
        if h > 0.0 {
            major.add(a * h);
        }
        let g = minorant_fn(u);
        if g > 0.0 {
            minor.add(a * g);
        }
    }
    let eps = 0.01;
    Ok(SmoothedSumResult {
        sharp: sharp.total(),
        majorant: major.total(),
        minorant: minor.total(),
        main: residue * x,
        error_bound: x.powf(0.75 + eps) * q_bound.powf(0.5 + eps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::EigenvalueTable;

    #[test]
    fn character_table_examples() {
        let t = characters_mod_q(1).unwrap();
        assert_eq!(t.count(), 1);
        assert_eq!(t.value(0, 7), Complex64::new(1.0, 0.0));

        let t = characters_mod_q(3).unwrap();
        assert_eq!(t.count(), 2);
        assert_eq!(t.value(0, 2), Complex64::new(1.0, 0.0)); // principal
        assert!((t.value(1, 2) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(t.value(0, 3), Complex64::new(0.0, 0.0));

        let t = characters_mod_q(5).unwrap();
        assert_eq!(t.count(), 4);
        assert!(t.orthogonality_defect() < 1e-10);
    }

    #[test]
    fn orthogonality_to_fifty() {
        for q in [2u64, 4, 8, 9, 12, 16, 24, 30, 36, 49, 50] {
            let t = characters_mod_q(q).unwrap();
            assert_eq!(t.count() as u64, primes::euler_phi(q));
            assert!(
                t.orthogonality_defect() < 1e-10,
                "q = {q}: defect {}",
                t.orthogonality_defect()
            );
        }
    }

    #[test]
    fn twisted_sum_examples() {
        let ones = EigenvalueTable::stub(200, |_| 1.0);
        let eta = EtaFunction::new(&ones);

        let t1 = characters_mod_q(1).unwrap();
        let s = twisted_eta_sum(&eta, &t1, 0, 100.0).unwrap();
        assert_eq!(s.re, 100.0);

        let t2 = characters_mod_q(2).unwrap();
        let s = twisted_eta_sum(&eta, &t2, 0, 100.0).unwrap();
        assert_eq!(s.re, 50.0); // odd n only
    }

    #[test]
    fn progression_examples() {
        let ones = EigenvalueTable::stub(200, |_| 1.0);
        let eta = EtaFunction::new(&ones);
        let calib = Calibration::with_x0(&ones, 200).unwrap();
        let p = progression_eta_sum(&eta, &calib, 1, 4, 100.0).unwrap();
        assert_eq!(p.direct, 25.0);
        assert!((p.via_orthogonality - 25.0).abs() < 1e-9);

        assert!(matches!(
            progression_eta_sum(&eta, &calib, 2, 4, 100.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn reconstruction_on_delta() {
        let t = EigenvalueTable::delta(10_000).unwrap();
        let eta = EtaFunction::new(&t);
        let calib = Calibration::with_x0(&t, 10_000).unwrap();
        for q in [3u64, 7, 12] {
            for m in 1..q {
                if primes::gcd(m, q) != 1 {
                    continue;
                }
                let p = progression_eta_sum(&eta, &calib, m, q, 10_000.0).unwrap();
                assert!(
                    (p.direct - p.via_orthogonality).abs() <= 1e-7 * (1.0 + p.direct),
                    "q={q} m={m}: {} vs {}",
                    p.direct,
                    p.via_orthogonality
                );
            }
        }
    }

    #[test]
    fn progression_sums_partition_coprime_total() {
        let t = EigenvalueTable::delta(20_000).unwrap();
        let eta = EtaFunction::new(&t);
        let calib = Calibration::with_x0(&t, 20_000).unwrap();
        let x = 20_000.0;
        for q in [4u64, 7, 15] {
            let mut parts = 0.0;
            for m in 1..q {
                if primes::gcd(m, q) != 1 {
                    continue;
                }
                parts += progression_eta_sum(&eta, &calib, m, q, x).unwrap().direct;
            }
            let total: f64 = (1..=x as u64)
                .filter(|&n| primes::gcd(n, q) == 1)
                .map(|n| eta.value(n))
                .sum();
            assert!(
                (parts - total).abs() <= 1e-9 * total,
                "q={q}: {parts} vs {total}"
            );
        }
    }

    #[test]
    fn smoothed_sum_examples() {
        let r = smoothed_dyadic_sum(|_| 1.0, 100.0, 10.0, 1.0, 1.0).unwrap();
        assert_eq!(r.sharp, 101.0); // n in [100, 200]
        assert!(r.minorant <= r.sharp && r.sharp <= r.majorant);
        assert_eq!(r.main, 100.0);

        // widest mollification still valid
        let r = smoothed_dyadic_sum(|_| 1.0, 100.0, 100.0, 1.0, 1.0).unwrap();
        assert!(r.minorant <= r.sharp && r.sharp <= r.majorant);

        assert!(matches!(
            smoothed_dyadic_sum(|_| 1.0, 100.0, 0.5, 1.0, 1.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn smoothed_sandwich_on_delta() {
        let t = EigenvalueTable::delta(3000).unwrap();
        let eta = EtaFunction::new(&t);
        let r = smoothed_dyadic_sum(|n| eta.value(n), 1000.0, 31.0, 1.0, 1.0).unwrap();
        assert!(r.minorant <= r.sharp && r.sharp <= r.majorant);
    }
}
