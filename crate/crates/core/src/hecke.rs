//! Hecke eigenvalue tables: exact generation for the discriminant form,
//! ingestion of external prime-indexed data, and the local Satake
//! parameters at each prime.
//!
//! A table holds Hecke-normalized values `lambda(n)` for `n = 1..=limit`.
//! The built-in source is the weight-12 discriminant form, for which the
//! Ramanujan bound `|lambda(p)| <= 2` is a theorem; loaded tables are only
//! guaranteed the Kim-Sarnak bound `|lambda(p)| <= 2 p^{7/64}`.

use crate::error::{Error, Result};
use crate::primes;
use crate::tau;
use num_complex::Complex64;
use std::io::BufRead;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    Deligne,
    KimSarnak,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Delta,
    File(String),
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Delta => write!(f, "delta"),
            Source::File(label) => write!(f, "file:{label}"),
        }
    }
}

#[derive(Debug)]
pub struct EigenvalueTable {
    limit: u64,
    values: Vec<f64>,
    source: Source,
    bound_mode: BoundMode,
}

/// Roots of `X^2 - lambda(p) X + 1`, the local parameters at `p`.
#[derive(Clone, Copy, Debug)]
pub struct LocalParams {
    pub p: u64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl LocalParams {
    /// `sum_{j=0}^m alpha^{m-j} beta^j`, evaluated by the real three-term
    /// recurrence `s_k = lambda(p) s_{k-1} - s_{k-2}`.
    pub fn power_sum(&self, m: u32) -> f64 {
        let lam = (self.alpha + self.beta).re;
        let (mut prev, mut cur) = (1.0f64, lam);
        if m == 0 {
            return 1.0;
        }
        for _ in 1..m {
            (prev, cur) = (cur, lam * cur - prev);
        }
        cur
    }
}

impl EigenvalueTable {
    /// Table for the discriminant form: `lambda(n) = tau(n) / n^{11/2}`
    /// with tau carried exactly up to the final division.
    pub fn delta(limit: u64) -> Result<Self> {
        let values = tau::delta_lambda_values(limit)?;
        Ok(EigenvalueTable {
            limit,
            values,
            source: Source::Delta,
            bound_mode: BoundMode::Deligne,
        })
    }

    /// Build from prime values: powers by the Hecke recursion
    /// `lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1})`,
    /// composites by multiplicativity.
    pub fn from_prime_values(
        limit: u64,
        prime_values: &[(u64, f64)],
        source: Source,
        bound_mode: BoundMode,
    ) -> Result<Self> {
        let n = limit as usize;
        let mut values = vec![0.0f64; n + 1];
        if n >= 1 {
            values[1] = 1.0;
        }
        let mut have = vec![false; n + 1];
        for &(p, v) in prime_values {
            if p > limit {
                continue;
            }
            have[p as usize] = true;
            let (mut prev, mut cur) = (1.0f64, v);
            let mut pk = p;
            while pk <= limit {
                values[pk as usize] = cur;
                (prev, cur) = (cur, v * cur - prev);
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
        for &p in &primes::primes_up_to(limit) {
            if !have[p as usize] {
                return Err(Error::Format(format!(
                    "prime {p} missing: entries required for every prime <= {limit}"
                )));
            }
        }
        let spf = primes::spf_table(n);
        for x in 2..=n {
            let p = spf[x] as usize;
            let mut m = p;
            let mut rest = x / p;
            while rest % p == 0 {
                m *= p;
                rest /= p;
            }
            if rest != 1 {
                values[x] = values[m] * values[rest];
            }
        }
        Ok(EigenvalueTable {
            limit,
            values,
            source,
            bound_mode,
        })
    }

    /// Load a prime-indexed eigenvalue file. Line-oriented text with a
    /// header `# shiftsieve-eigen v1 kind=<ap|lambda> weight=<int|maass>
    /// label=<string>`, body lines `p value`, `#` comments ignored.
    /// `kind=ap` values are divided by `p^{(weight-1)/2}` on load
    /// (`weight=maass` means the values are already normalized).
    pub fn load(path: &Path, limit: u64) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file), limit)
    }

    pub fn from_reader(reader: impl BufRead, limit: u64) -> Result<Self> {
        let mut header: Option<(String, Option<u32>, String)> = None; // kind, weight, label
        let mut prime_values: Vec<(u64, f64)> = Vec::new();
        let mut seen: std::collections::HashSet<u64> = std::collections::HashSet::new();

        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('#') {
                if header.is_none() && trimmed.starts_with("# shiftsieve-eigen") {
                    header = Some(parse_header(trimmed, lineno)?);
                }
                continue;
            }
            let (kind, weight, _) = header.as_ref().ok_or_else(|| Error::Format(
                "missing header line `# shiftsieve-eigen v1 kind=... weight=... label=...`".into(),
            ))?;
            let mut parts = trimmed.split_whitespace();
            let p: u64 = parts
                .next()
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno,
                    msg: "expected a prime index".into(),
                })?;
            let raw: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: "missing value field".into(),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno,
                    msg: "value is not a number".into(),
                })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "trailing fields".into(),
                });
            }
            if !primes::is_prime(p) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("index {p} is not prime"),
                });
            }
            if !seen.insert(p) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("duplicate entry for prime {p}"),
                });
            }
            let lam = match (kind.as_str(), weight) {
                ("lambda", _) => raw,
                ("ap", Some(w)) => raw / (p as f64).powf((*w as f64 - 1.0) / 2.0),
                ("ap", None) => raw, // Maass data is already Hecke-normalized
                _ => unreachable!(),
            };
            if lam.abs() > 2.0 * (p as f64).powf(7.0 / 64.0) + 1e-9 {
                return Err(Error::Consistency(format!(
                    "lambda({p}) = {lam} violates the Kim-Sarnak bound"
                )));
            }
            prime_values.push((p, lam));
        }

        let (_, _, label) = header.ok_or_else(|| {
            Error::Format("empty file: header line required".into())
        })?;
        Self::from_prime_values(
            limit,
            &prime_values,
            Source::File(label),
            BoundMode::KimSarnak,
        )
    }

    /// Raw table with prescribed values; no Hecke structure implied.
    /// `lambda(1)` is forced to 1. Intended for diagnostics and tests.
    pub fn stub(limit: u64, f: impl Fn(u64) -> f64) -> Self {
        let mut values = vec![0.0f64; limit as usize + 1];
        for n in 1..=limit {
            values[n as usize] = f(n);
        }
        values[1] = 1.0;
        EigenvalueTable {
            limit,
            values,
            source: Source::File("stub".into()),
            bound_mode: BoundMode::KimSarnak,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn bound_mode(&self) -> BoundMode {
        self.bound_mode
    }

    /// `lambda(n)`; the caller guarantees `1 <= n <= limit`.
    #[inline]
    pub fn lambda(&self, n: u64) -> f64 {
        self.values[n as usize]
    }

    pub fn try_lambda(&self, n: u64) -> Result<f64> {
        if n == 0 || n > self.limit {
            return Err(Error::Range(format!(
                "lambda({n}) outside table limit {}",
                self.limit
            )));
        }
        Ok(self.values[n as usize])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `lambda(p^k)`: from the table when `p^k <= limit`, otherwise by the
    /// Hecke recursion from `lambda(p)`.
    pub fn lambda_prime_power(&self, p: u64, k: u32) -> Result<f64> {
        if p > self.limit {
            return Err(Error::Range(format!("prime {p} outside table")));
        }
        if let Some(pk) = p.checked_pow(k) {
            if pk <= self.limit {
                return Ok(self.values[pk as usize]);
            }
        }
        let lam = self.values[p as usize];
        let (mut prev, mut cur) = (1.0f64, lam);
        if k == 0 {
            return Ok(1.0);
        }
        for _ in 1..k {
            (prev, cur) = (cur, lam * cur - prev);
        }
        Ok(cur)
    }

    /// `lambda(m) lambda(n) - sum_{d | (m,n)} lambda(mn / d^2)`.
    pub fn hecke_relation_residual(&self, m: u64, n: u64) -> Result<f64> {
        let mn = m
            .checked_mul(n)
            .filter(|&v| v <= self.limit)
            .ok_or_else(|| {
                Error::Range(format!("m*n = {m}*{n} exceeds table limit {}", self.limit))
            })?;
        let g = primes::gcd(m, n);
        let mut sum = 0.0;
        for d in divisors(g) {
            sum += self.values[(mn / (d * d)) as usize];
        }
        Ok(self.values[m as usize] * self.values[n as usize] - sum)
    }

    /// Local parameters at `p`: the roots of `X^2 - lambda(p) X + 1`.
    pub fn local_params(&self, p: u64) -> Result<LocalParams> {
        if !primes::is_prime(p) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        let lam = self.try_lambda(p)?;
        let disc = lam * lam - 4.0;
        let (alpha, beta) = if disc >= 0.0 {
            let s = disc.sqrt();
            (
                Complex64::new((lam + s) / 2.0, 0.0),
                Complex64::new((lam - s) / 2.0, 0.0),
            )
        } else {
            let s = (-disc).sqrt();
            (
                Complex64::new(lam / 2.0, s / 2.0),
                Complex64::new(lam / 2.0, -s / 2.0),
            )
        };
        Ok(LocalParams { p, alpha, beta })
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(String, Option<u32>, String)> {
    let rest = line.trim_start_matches('#').trim();
    let mut tokens = rest.split_whitespace();
    if tokens.next() != Some("shiftsieve-eigen") || tokens.next() != Some("v1") {
        return Err(Error::Parse {
            line: lineno,
            msg: "header must begin `# shiftsieve-eigen v1`".into(),
        });
    }
    let mut kind = None;
    let mut weight = None;
    let mut label = None;
    for tok in tokens {
        match tok.split_once('=') {
            Some(("kind", v)) if v == "ap" || v == "lambda" => kind = Some(v.to_string()),
            Some(("kind", v)) => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unknown kind `{v}` (expected ap or lambda)"),
                })
            }
            Some(("weight", "maass")) => weight = Some(None),
            Some(("weight", v)) => {
                let w: u32 = v.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("weight must be an integer or `maass`, got `{v}`"),
                })?;
                weight = Some(Some(w));
            }
            Some(("label", v)) => label = Some(v.to_string()),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unrecognized header field `{tok}`"),
                })
            }
        }
    }
    match (kind, weight, label) {
        (Some(k), Some(w), Some(l)) => Ok((k, w, l)),
        _ => Err(Error::Parse {
            line: lineno,
            msg: "header requires kind=, weight=, label=".into(),
        }),
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in primes::factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|&d| d * pk));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_small() -> EigenvalueTable {
        EigenvalueTable::delta(10_000).unwrap()
    }

    #[test]
    fn delta_examples() {
        let t = EigenvalueTable::delta(3).unwrap();
        assert_eq!(t.lambda(1), 1.0);
        assert!((t.lambda(2) + 0.530330086).abs() < 1e-8);
        assert!((t.lambda(3) - 0.598733).abs() < 1e-6);
        assert_eq!(t.bound_mode(), BoundMode::Deligne);
    }

    #[test]
    fn load_single_prime() {
        let data = "# shiftsieve-eigen v1 kind=lambda weight=maass label=toy\n2 -0.5\n";
        let t = EigenvalueTable::from_reader(data.as_bytes(), 2).unwrap();
        assert_eq!(t.lambda(2), -0.5);
        assert_eq!(t.bound_mode(), BoundMode::KimSarnak);
        assert_eq!(t.source().to_string(), "file:toy");
    }

    #[test]
    fn load_missing_prime() {
        let data = "# shiftsieve-eigen v1 kind=lambda weight=maass label=toy\n2 -0.5\n";
        match EigenvalueTable::from_reader(data.as_bytes(), 4) {
            Err(Error::Format(msg)) => assert!(msg.contains("prime 3"), "{msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn load_zero_ap_recursion() {
        let data = "# shiftsieve-eigen v1 kind=ap weight=maass label=z\n2 0\n3 0\n5 0\n7 0\n";
        let t = EigenvalueTable::from_reader(data.as_bytes(), 8).unwrap();
        assert_eq!(t.lambda(4), -1.0);
        assert_eq!(t.lambda(8), 0.0);
        assert_eq!(t.lambda(6), 0.0);
    }

    #[test]
    fn load_ap_normalization() {
        // weight 12: a_2 = tau(2) = -24 must normalize to tau(2)/2^{5.5}
        let data = "# shiftsieve-eigen v1 kind=ap weight=12 label=disc\n2 -24\n3 252\n";
        let t = EigenvalueTable::from_reader(data.as_bytes(), 3).unwrap();
        assert!((t.lambda(2) + 0.530330086).abs() < 1e-8);
    }

    #[test]
    fn load_rejects_kim_sarnak_violations() {
        let data = "# shiftsieve-eigen v1 kind=lambda weight=maass label=bad\n2 9.0\n";
        match EigenvalueTable::from_reader(data.as_bytes(), 2) {
            Err(Error::Consistency(msg)) => assert!(msg.contains("Kim-Sarnak")),
            other => panic!("expected consistency error, got {other:?}"),
        }
    }

    #[test]
    fn load_malformed_line_has_line_number() {
        let data = "# shiftsieve-eigen v1 kind=lambda weight=maass label=t\n2 0.1\nnot numbers\n";
        match EigenvalueTable::from_reader(data.as_bytes(), 2) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn hecke_residual_examples() {
        let t = delta_small();
        assert!(t.hecke_relation_residual(2, 3).unwrap().abs() < 1e-12);
        assert!(t.hecke_relation_residual(2, 2).unwrap().abs() < 1e-9);
        assert!(t.hecke_relation_residual(4, 6).unwrap().abs() < 1e-9);
        assert!(t.hecke_relation_residual(200, 50).unwrap().abs() < 1e-9);
    }

    #[test]
    fn residual_range_error() {
        let t = EigenvalueTable::delta(10).unwrap();
        assert!(matches!(
            t.hecke_relation_residual(4, 6),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn local_params_examples() {
        let two = EigenvalueTable::stub(10, |_| 2.0);
        let lp = two.local_params(2).unwrap();
        assert!((lp.alpha - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((lp.beta - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let zero = EigenvalueTable::stub(10, |_| 0.0);
        let lp = zero.local_params(2).unwrap();
        assert!((lp.alpha - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((lp.beta - Complex64::new(0.0, -1.0)).norm() < 1e-12);

        let t = delta_small();
        let lp = t.local_params(2).unwrap();
        assert!((lp.alpha.norm() - 1.0).abs() < 1e-12);
        assert!((lp.alpha + lp.beta - Complex64::new(t.lambda(2), 0.0)).norm() < 1e-12);
        assert!((lp.alpha * lp.beta - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        assert!(matches!(t.local_params(4), Err(Error::Argument(_))));
    }

    #[test]
    fn power_sum_matches_table() {
        let t = delta_small();
        for p in [2u64, 3, 5, 7] {
            let lp = t.local_params(p).unwrap();
            for k in 0..5u32 {
                if let Some(pk) = p.checked_pow(k) {
                    if pk <= t.limit() {
                        assert!(
                            (lp.power_sum(k) - t.lambda(pk)).abs() < 1e-8,
                            "p={p} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicativity_exhaustive_small() {
        let t = delta_small();
        for m in 2..=100u64 {
            for n in 2..=100u64 {
                if m * n <= t.limit() && primes::gcd(m, n) == 1 {
                    let lhs = t.lambda(m * n);
                    let rhs = t.lambda(m) * t.lambda(n);
                    assert!(
                        (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0),
                        "({m},{n})"
                    );
                }
            }
        }
    }
}
