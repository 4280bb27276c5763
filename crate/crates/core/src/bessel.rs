//! K-Bessel machinery for imaginary order: point evaluation by an
//! exponentially convergent trapezoid rule, Mellin-transform identities,
//! weighted square integrals with their exponential normalizations, and
//! the archimedean kernel of the shifted sums.
//!
//! The evaluator uses the real integral
//! `K_{ir}(y) = int_0^inf exp(-y cosh t) cos(r t) dt`,
//! truncated where `y cosh T = y + log(1/eps)` and refined by halving the
//! step; the integrand is analytic in a strip, so the trapezoid error
//! decays geometrically in 1/h.

use crate::detsum::Neumaier;
use crate::error::{Error, Result};
use crate::gamma;
use crate::hecke::EigenvalueTable;
use num_complex::Complex64;

/// K_{ir}(y) evaluator with a fixed target accuracy.
#[derive(Clone, Copy, Debug)]
pub struct BesselEvaluator {
    pub eps: f64,
}

impl BesselEvaluator {
    pub fn new(eps: f64) -> Result<Self> {
        if !(1e-14 < eps && eps < 1e-4) {
            return Err(Error::Argument(format!(
                "eps must lie in (1e-14, 1e-4), got {eps}"
            )));
        }
        Ok(BesselEvaluator { eps })
    }

    /// Truncation point: `cosh T = (log(1/eps) + y) / y`.
    pub fn truncation(&self, y: f64) -> f64 {
        (((1.0 / self.eps).ln() + y) / y).acosh()
    }

    pub fn rule(&self) -> &'static str {
        "trapezoid, geometric step halving"
    }

    /// `K_{ir}(y)` to absolute accuracy `eps * max(1, e^-y)`. Underflow
    /// to zero for very large y is permitted.
    pub fn eval(&self, r: f64, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::Argument(format!("argument must be > 0, got {y}")));
        }
        if !(r >= 0.0) {
            return Err(Error::Argument(format!("order must be >= 0, got {r}")));
        }
        let t_max = self.truncation(y);
        let tol = self.eps * (-y).exp().max(1.0) * 0.5;
        // Step small enough that the quadrature resolves the cos(r t)
        // oscillation from the start.
        let mut h = (0.25f64).min(std::f64::consts::PI / (2.0 * (r + 1.0)));
        let f = |t: f64| (-y * t.cosh()).exp() * (r * t).cos();
        let mut n = (t_max / h).ceil() as usize + 1;
        h = t_max / n as f64;
        let trapezoid = |h: f64, n: usize| -> f64 {
            let mut acc = Neumaier::default();
            acc.add(0.5 * f(0.0));
            for k in 1..=n {
                acc.add(f(k as f64 * h));
            }
            acc.total() * h
        };
        let mut prev = trapezoid(h, n);
        for _ in 0..12 {
            h *= 0.5;
            n *= 2;
            let cur = trapezoid(h, n);
            let diff = (cur - prev).abs();
            prev = cur;
            if diff <= tol {
                break;
            }
        }
        Ok(prev)
    }
}

/// One-shot evaluation of `K_{ir}(y)`.
pub fn k_bessel_imag(r: f64, y: f64, eps: f64) -> Result<f64> {
    BesselEvaluator::new(eps)?.eval(r, y)
}

/// Composite Simpson with panel doubling until the value settles.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, start: usize) -> f64 {
    fn pass(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = Neumaier::default();
        acc.add(f(a));
        acc.add(f(b));
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc.add(w * f(a + k as f64 * h));
        }
        acc.total() * h / 3.0
    }
    let mut n = start.next_power_of_two().max(16);
    let mut prev = pass(f, a, b, n);
    for _ in 0..14 {
        n *= 2;
        let cur = pass(f, a, b, n);
        let diff = (cur - prev).abs();
        prev = cur;
        if diff <= rel_tol * cur.abs().max(1e-300) {
            break;
        }
    }
    prev
}

/// A smooth bump supported on [lo, hi], normalized to peak value 1, with
/// its Mellin transform by quadrature.
#[derive(Clone, Copy, Debug)]
pub struct SmoothBump {
    pub lo: f64,
    pub hi: f64,
}

impl SmoothBump {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 < lo && lo < hi) {
            return Err(Error::Argument(format!(
                "support must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(SmoothBump { lo, hi })
    }

    /// `exp(1 - 1/(1 - t^2))` on the support mapped to t in (-1, 1).
    pub fn eval(&self, y: f64) -> f64 {
        let t = (2.0 * y - (self.lo + self.hi)) / (self.hi - self.lo);
        if t.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    }

    /// `G(s) = int g(y) y^{s-1} dy` over the support.
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        let re = simpson(
            &|y: f64| {
                let g = self.eval(y);
                if g == 0.0 {
                    0.0
                } else {
                    g * (y.ln() * (s - 1.0)).exp().re
                }
            },
            self.lo,
            self.hi,
            1e-12,
            64,
        );
        let im = simpson(
            &|y: f64| {
                let g = self.eval(y);
                if g == 0.0 {
                    0.0
                } else {
                    g * (y.ln() * (s - 1.0)).exp().im
                }
            },
            self.lo,
            self.hi,
            1e-12,
            64,
        );
        Complex64::new(re, im)
    }

    /// Measured constant `max |G(sigma + it)| (1 + |s|)^2` on a strip
    /// grid; finite because the transform of a smooth bump decays faster
    /// than any power.
    pub fn mellin_decay_constant(&self, sigma: f64, t_max: f64, steps: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=steps {
            let t = t_max * k as f64 / steps as f64;
            let s = Complex64::new(sigma, t);
            let g = self.mellin(s).norm();
            worst = worst.max(g * (1.0 + s.norm()).powi(2));
        }
        worst
    }
}

/// Both sides of the Mellin identity
/// `int K_mu K_nu y^{s-1} dy = 2^{s-3} Gamma(s)^{-1}
///  prod Gamma((s +- mu +- nu)/2)` for imaginary orders mu = i mu_r,
/// nu = i nu_r and real s > 0.
#[derive(Clone, Copy, Debug)]
pub struct MellinCheck {
    pub numeric: f64,
    pub closed_form: f64,
    pub rel_err: f64,
}

pub fn mellin_identity_check(mu_r: f64, nu_r: f64, s: f64) -> Result<MellinCheck> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("Re(s) must be > 0, got {s}")));
    }
    let eval = BesselEvaluator::new(1e-12)?;
    // substitute y = e^u; the integrand decays like e^{s u} at -inf and
    // double-exponentially at +inf
    let u_min = (1e-14f64.ln()) / s - 3.0;
    let u_max = (0.5 * (1e16f64).ln() + 3.0).ln();
    let f = |u: f64| -> f64 {
        let y = u.exp();
        let k1 = eval.eval(mu_r, y).unwrap_or(0.0);
        let k2 = if (nu_r - mu_r).abs() < 1e-15 {
            k1
        } else {
            eval.eval(nu_r, y).unwrap_or(0.0)
        };
        k1 * k2 * (s * u).exp()
    };
    let numeric = simpson(&f, u_min, u_max, 1e-9, 2048);

    let sc = Complex64::new(s, 0.0);
    let plus = Complex64::new(s / 2.0, (mu_r + nu_r) / 2.0);
    let minus = Complex64::new(s / 2.0, (mu_r - nu_r) / 2.0);
    let log_closed = (s - 3.0) * 2.0f64.ln() - gamma::ln_gamma(sc).re
        + 2.0 * gamma::ln_gamma(plus).re
        + 2.0 * gamma::ln_gamma(minus).re;
    let closed_form = log_closed.exp();
    Ok(MellinCheck {
        numeric,
        closed_form,
        rel_err: (numeric - closed_form).abs() / closed_form.abs(),
    })
}

/// `I = int g(y) K_{ir}(w y)^2 y^{-1} dy` and its exponential
/// normalization `r e^{pi r} I` (computed in log space).
pub fn weighted_square_integral(g: &SmoothBump, w: f64, r: f64) -> Result<(f64, f64)> {
    if !(w > 0.0) {
        return Err(Error::Argument(format!("w must be > 0, got {w}")));
    }
    if !(r > 0.0) {
        return Err(Error::Argument(format!("r must be > 0, got {r}")));
    }
    let eval = BesselEvaluator::new(1e-13)?;
    let f = |y: f64| -> f64 {
        let gv = g.eval(y);
        if gv == 0.0 {
            return 0.0;
        }
        let k = eval.eval(r, w * y).unwrap_or(0.0);
        gv * k * k / y
    };
    let integral = simpson(&f, g.lo, g.hi, 1e-9, 512);
    let normalized = if integral > 0.0 {
        (integral.ln() + std::f64::consts::PI * r + r.ln()).exp()
    } else {
        0.0
    };
    Ok((integral, normalized))
}

/// Difference between `int g K_{ir}^2 y^{-1} dy` and the residue value
/// `(1/4) Gamma(ir) Gamma(-ir) G(0) = pi G(0) / (4 r sinh(pi r))`,
/// reported as `|difference| * r^2 e^{pi r}`.
pub fn k_square_residue_error(g: &SmoothBump, r: f64) -> Result<f64> {
    if !(r >= 2.0) {
        return Err(Error::Argument(format!("r must be >= 2, got {r}")));
    }
    let (integral, _) = weighted_square_integral(g, 1.0, r)?;
    let g0 = g.mellin(Complex64::new(0.0, 0.0)).re;
    let closed = 0.25 * gamma::gamma_ir_product(r) * g0;
    let diff = (integral - closed).abs();
    if diff == 0.0 {
        return Ok(0.0);
    }
    Ok((diff.ln() + std::f64::consts::PI * r + 2.0 * r.ln()).exp())
}

/// Archimedean kernel of a shifted convolution sum at scale X:
/// `sum_n h(|n|/(rX)) h(|n+l|/(rX)) lambda(|n|) lambda(|n+l|)
///  int w(y) g(X y) K_{ir}(2 pi |n| y) K_{ir}(2 pi |n+l| y) y^{-1} dy`
/// over the nonzero integers n (both signs), with a supplied bounded
/// weight w (identically 1 in the default application).
#[allow(clippy::too_many_arguments)]
pub fn kernel_shifted_sum(
    table: &EigenvalueTable,
    x_scale: f64,
    r: f64,
    shift: i64,
    h: &SmoothBump,
    g: &SmoothBump,
    weight: impl Fn(f64) -> f64,
) -> Result<f64> {
    if shift == 0 {
        return Err(Error::Argument("shift must be non-zero".into()));
    }
    if !(x_scale >= 1.0 && r > 0.0) {
        return Err(Error::Argument(
            "scale must be >= 1 and order positive".into(),
        ));
    }
    let scale = r * x_scale;
    let n_max = (h.hi * scale).floor() as i64;
    let needed = n_max + shift.abs();
    if needed as u64 > table.limit() {
        return Err(Error::Range(format!(
            "kernel needs eigenvalues to {needed} but table stops at {}",
            table.limit()
        )));
    }
    let eval = BesselEvaluator::new(1e-12)?;
    let y_lo = g.lo / x_scale;
    let y_hi = g.hi / x_scale;
    let mut acc = Neumaier::default();
    for n in -n_max..=n_max {
        if n == 0 || n + shift == 0 {
            continue;
        }
        let an = n.unsigned_abs();
        let am = (n + shift).unsigned_abs();
        let hv = h.eval(an as f64 / scale) * h.eval(am as f64 / scale);
        if hv == 0.0 {
            continue;
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let f = |y: f64| -> f64 {
            let gv = g.eval(x_scale * y);
            if gv == 0.0 {
                return 0.0;
            }
            let k1 = eval.eval(r, two_pi * an as f64 * y).unwrap_or(0.0);
            let k2 = eval.eval(r, two_pi * am as f64 * y).unwrap_or(0.0);
            weight(y) * gv * k1 * k2 / y
        };
        let integral = simpson(&f, y_lo, y_hi, 1e-8, 128);
        acc.add(hv * table.lambda(an) * table.lambda(am) * integral);
    }
    Ok(acc.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power-series oracle for K_0: independent of the trapezoid path.
    /// K_0(y) = -(ln(y/2) + euler_gamma) I_0(y) + sum_{k>=1} (y/2)^{2k}
    ///          H_k / (k!)^2.
    fn k0_series(y: f64) -> f64 {
        let euler_gamma = 0.577_215_664_901_532_9;
        let q = y * y / 4.0;
        let mut i0 = 1.0;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut h = 0.0;
        for k in 1..60 {
            term *= q / (k * k) as f64;
            i0 += term;
            h += 1.0 / k as f64;
            sum += term * h;
        }
        -(y / 2.0).ln() * i0 - euler_gamma * i0 + sum
    }

    #[test]
    fn k0_matches_series_oracle() {
        let eval = BesselEvaluator::new(1e-12).unwrap();
        for y in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let got = eval.eval(0.0, y).unwrap();
            let expect = k0_series(y);
            assert!(
                (got - expect).abs() < 1e-10,
                "y = {y}: {got} vs {expect}"
            );
        }
        // spot value
        assert!((eval.eval(0.0, 1.0).unwrap() - 0.421024438).abs() < 1e-9);
    }

    #[test]
    fn evaluator_validates_inputs() {
        assert!(BesselEvaluator::new(1e-3).is_err());
        assert!(BesselEvaluator::new(1e-15).is_err());
        let e = BesselEvaluator::new(1e-10).unwrap();
        assert!(e.eval(1.0, 0.0).is_err());
        assert!(e.eval(-1.0, 1.0).is_err());
    }

    #[test]
    fn exponential_decay_regime() {
        // y >= 1 + r^2: K is within C (1+r^2)/y of the leading asymptotic
        let eval = BesselEvaluator::new(1e-12).unwrap();
        for r in [0.0, 1.0, 2.0] {
            let y: f64 = 3.0 * (1.0 + r * r);
            let k = eval.eval(r, y).unwrap();
            let asym = (std::f64::consts::PI / (2.0 * y)).sqrt() * (-y).exp();
            let c = (k - asym).abs() / asym * y / (1.0 + r * r);
            assert!(c <= 2.0, "r = {r}: constant {c}");
        }
    }

    #[test]
    fn mellin_identity_examples() {
        let m = mellin_identity_check(0.0, 0.0, 1.0).unwrap();
        let expect = std::f64::consts::PI * std::f64::consts::PI / 4.0;
        assert!((m.closed_form - expect).abs() < 1e-10);
        assert!(m.rel_err <= 1e-6, "rel err {}", m.rel_err);

        let m = mellin_identity_check(1.0, 1.0, 1.0).unwrap();
        assert!(m.rel_err <= 1e-6, "rel err {}", m.rel_err);
        // symmetry in (mu, nu)
        let m2 = mellin_identity_check(1.0, 0.5, 1.2).unwrap();
        let m3 = mellin_identity_check(0.5, 1.0, 1.2).unwrap();
        assert_eq!(m2.closed_form, m3.closed_form);
        assert!((m2.numeric - m3.numeric).abs() < 1e-9 * m2.numeric.abs());

        assert!(mellin_identity_check(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn square_mellin_decays_like_stirling() {
        // int K_{ir}^2 y^{sigma-1} dy scaled by r^{1-sigma} e^{pi r}
        // stays bounded for sigma in (0, 3/2]; the closed form gives
        // 2^{sigma-3} Gamma(sigma)^{-1} Gamma(sigma/2)^2 * 2 pi in the
        // limit, which is below 10 on this grid.
        for sigma in [0.5f64, 1.0, 1.5] {
            for r in [2.0f64, 4.0, 8.0, 12.0] {
                let m = mellin_identity_check(r, r, sigma).unwrap();
                let normalized =
                    (m.numeric.ln() + (1.0 - sigma) * r.ln() + std::f64::consts::PI * r).exp();
                assert!(
                    normalized.is_finite() && normalized < 50.0,
                    "sigma={sigma} r={r}: normalized {normalized}"
                );
            }
        }
    }

    #[test]
    fn weighted_square_positive_and_decaying() {
        let g = SmoothBump::new(1.0, 2.0).unwrap();
        let (i1, _) = weighted_square_integral(&g, 1.0, 1.0).unwrap();
        let (i10, _) = weighted_square_integral(&g, 10.0, 1.0).unwrap();
        assert!(i1 > 0.0 && i10 > 0.0);
        assert!(i10 < i1);
    }

    #[test]
    fn residue_formula_converges_in_r() {
        let g = SmoothBump::new(1.0, 2.0).unwrap();
        let e3 = k_square_residue_error(&g, 3.0).unwrap();
        let e10 = k_square_residue_error(&g, 10.0).unwrap();
        assert!(e3.is_finite() && e10.is_finite());
        // relative agreement improves with r
        let rel = |r: f64, e: f64| {
            let g0 = g.mellin(Complex64::new(0.0, 0.0)).re;
            let closed = 0.25 * gamma::gamma_ir_product(r) * g0;
            e * (-std::f64::consts::PI * r).exp() / (r * r) / closed
        };
        assert!(rel(10.0, e10) < rel(3.0, e3));
        assert!(k_square_residue_error(&g, 1.0).is_err());
    }

    #[test]
    fn bump_mellin_decay() {
        let g = SmoothBump::new(1.0, 2.0).unwrap();
        assert!(g.eval(1.5) == 1.0);
        assert_eq!(g.eval(0.9), 0.0);
        let c = g.mellin_decay_constant(0.5, 40.0, 20);
        assert!(c.is_finite() && c > 0.0);
        // |G| itself must fall below C/(1+|s|)^2 everywhere on the grid
        let s = Complex64::new(0.5, 35.0);
        assert!(g.mellin(s).norm() <= c / (1.0 + s.norm()).powi(2) + 1e-12);
    }

    #[test]
    fn kernel_reductions() {
        let g = SmoothBump::new(0.02, 0.2).unwrap();

        // support of h misses every integer multiple of 1/(r X): zero sum
        let table = EigenvalueTable::stub(100, |_| 1.0);
        let h_gap = SmoothBump::new(0.001, 0.009).unwrap();
        let v = kernel_shifted_sum(&table, 100.0, 1.0, 1, &h_gap, &g, |_| 1.0).unwrap();
        assert_eq!(v, 0.0);

        // table shorter than the h-window: range error
        let h_far = SmoothBump::new(8.0, 9.0).unwrap();
        let s = kernel_shifted_sum(&table, 100.0, 1.0, 1, &h_far, &g, |_| 1.0);
        assert!(matches!(s, Err(Error::Range(_))));

        // with support (0.95, 1.2) at rX = 10 only the pair {10, 11}
        // survives, once as n = 10 and once mirrored as n = -11
        let narrow = SmoothBump::new(0.95, 1.2).unwrap();
        let v = kernel_shifted_sum(&table, 10.0, 1.0, 1, &narrow, &g, |_| 1.0).unwrap();
        let eval = BesselEvaluator::new(1e-12).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let hv = narrow.eval(1.0) * narrow.eval(1.1);
        let f = |y: f64| -> f64 {
            let gv = g.eval(10.0 * y);
            if gv == 0.0 {
                return 0.0;
            }
            gv * eval.eval(1.0, two_pi * 10.0 * y).unwrap()
                * eval.eval(1.0, two_pi * 11.0 * y).unwrap()
                / y
        };
        let expect = 2.0 * hv * simpson(&f, g.lo / 10.0, g.hi / 10.0, 1e-8, 128);
        assert!(
            (v - expect).abs() <= 1e-9 * expect.abs().max(1e-12),
            "{v} vs {expect}"
        );
    }

    #[test]
    fn kernel_scales_quadratically() {
        let base = EigenvalueTable::stub(400, |n| 1.0 / (1.0 + (n % 7) as f64));
        let doubled = EigenvalueTable::stub(400, |n| 2.0 / (1.0 + (n % 7) as f64));
        let h = SmoothBump::new(0.5, 1.5).unwrap();
        let g = SmoothBump::new(0.02, 0.2).unwrap();
        let v1 = kernel_shifted_sum(&base, 5.0, 10.0, 1, &h, &g, |_| 1.0).unwrap();
        let v2 = kernel_shifted_sum(&doubled, 5.0, 10.0, 1, &h, &g, |_| 1.0).unwrap();
        assert!(v1 != 0.0);
        assert!((v2 / v1 - 4.0).abs() < 1e-6, "ratio {}", v2 / v1);
    }
}
