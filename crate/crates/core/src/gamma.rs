//! Complex gamma function by Lanczos approximation (g = 7, 9 terms),
//! with reflection for the left half plane.

use num_complex::Complex64;

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Principal branch of log Gamma.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        let pi_c = Complex64::new(pi, 0.0);
        return (pi_c / (pi * z).sin()).ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(COEFFS[0], 0.0);
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `|Gamma(1/2 + i r)|^2 = pi / cosh(pi r)`, exact closed form.
pub fn abs_gamma_half_ir_sq(r: f64) -> f64 {
    std::f64::consts::PI / (std::f64::consts::PI * r).cosh()
}

/// `Gamma(i r) Gamma(-i r) = pi / (r sinh(pi r))`, exact closed form.
pub fn gamma_ir_product(r: f64) -> f64 {
    std::f64::consts::PI / (r * (std::f64::consts::PI * r).sinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        for (x, expect) in [
            (1.0, 1.0),
            (2.0, 1.0),
            (5.0, 24.0),
            (0.5, std::f64::consts::PI.sqrt()),
        ] {
            let g = gamma(Complex64::new(x, 0.0));
            assert!((g.re - expect).abs() < 1e-12 * expect, "Gamma({x})");
            assert!(g.im.abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_negative_half() {
        // Gamma(-0.5) = -2 sqrt(pi)
        let g = gamma(Complex64::new(-0.5, 0.0));
        assert!((g.re + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn imaginary_axis_products() {
        // closed forms give independent oracles on the imaginary axis
        for r in [0.5f64, 1.0, 2.0, 5.0, 12.0] {
            let half_ir = gamma(Complex64::new(0.5, r));
            let expect = abs_gamma_half_ir_sq(r);
            let got = half_ir.norm_sqr();
            assert!(
                (got - expect).abs() < 1e-10 * expect,
                "r = {r}: {got} vs {expect}"
            );

            let prod = gamma(Complex64::new(0.0, r)) * gamma(Complex64::new(0.0, -r));
            let expect = gamma_ir_product(r);
            assert!(
                (prod.re - expect).abs() < 1e-10 * expect && prod.im.abs() < 1e-10 * expect,
                "r = {r}"
            );
        }
    }

    #[test]
    fn functional_equation_complex() {
        for z in [
            Complex64::new(0.8, 3.0),
            Complex64::new(2.3, -1.7),
            Complex64::new(0.5, 12.0),
        ] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "z = {z}");
        }
    }
}
