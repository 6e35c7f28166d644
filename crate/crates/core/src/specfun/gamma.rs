use std::f64::consts::PI;

use num_complex::Complex64;

use super::poly::Ring;
use crate::error::{domain, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_SHIFT: f64 = 15.0;

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

// B_{2k} / (2k), k = 1..8
const DIGAMMA_ASYM: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn stirling_tail(z: f64) -> f64 {
    let zi = 1.0 / z;
    let z2 = zi * zi;
    let mut s = 0.0;
    let mut p = zi;
    for c in STIRLING {
        s += c * p;
        p *= z2;
    }
    s
}

/// ln|Gamma(x)| together with the sign of Gamma(x).
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return domain("ln_gamma of NaN");
    }
    if is_nonpositive_integer(x) {
        return domain(format!("Gamma has a pole at {x}"));
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (PI * x).sin();
        let (lg, _) = ln_gamma_signed(1.0 - x)?;
        return Ok((PI.ln() - s.abs().ln() - lg, s.signum()));
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_SHIFT {
        prod *= z;
        z += 1.0;
    }
    let lg = (z - 0.5) * z.ln() - z + LN_SQRT_2PI + stirling_tail(z) - prod.ln();
    Ok((lg, 1.0))
}

/// ln Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    ln_gamma_signed(x).map(|(v, _)| v)
}

/// Gamma(x) on the real line, poles rejected.
pub fn gamma(x: f64) -> Result<f64> {
    let (lg, s) = ln_gamma_signed(x)?;
    Ok(s * lg.exp())
}

/// Digamma psi(x) on the real line, poles rejected.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return domain("digamma of NaN");
    }
    if is_nonpositive_integer(x) {
        return domain(format!("digamma has a pole at {x}"));
    }
    if x < 0.5 {
        // psi(1-x) - psi(x) = pi cot(pi x)
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let zi2 = 1.0 / (z * z);
    let mut s = 0.0;
    let mut p = zi2;
    for c in DIGAMMA_ASYM {
        s += c * p;
        p *= zi2;
    }
    Ok(acc + z.ln() - 0.5 / z - s)
}

/// Principal-ish ln Gamma(z) for complex z; only exp() of it is branch independent.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return domain(format!("Gamma has a pole at {}", z.re));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z)?);
    }
    let mut w = z;
    let mut logprod = Complex64::new(0.0, 0.0);
    while w.re < STIRLING_SHIFT {
        logprod += w.ln();
        w += 1.0;
    }
    let wi = w.inv();
    let wi2 = wi * wi;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut p = wi;
    for c in STIRLING {
        tail += p * c;
        p *= wi2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + tail - logprod)
}

/// Falling factorial q (q-1) ... (q-k+1).
pub fn pochhammer_falling<T: Ring>(q: &T, k: usize) -> T {
    let mut acc = T::one();
    for j in 0..k {
        acc = acc * (q.clone() - T::from_i64(j as i64));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gamma_known_values() {
        assert!(close(gamma(0.5).unwrap(), PI.sqrt(), 1e-14));
        assert!(close(gamma(5.0).unwrap(), 24.0, 1e-14));
        assert!(close(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), 1e-14));
        assert!(close(gamma(-1.5).unwrap(), 4.0 * PI.sqrt() / 3.0, 1e-14));
        assert!(close(ln_gamma(100.0).unwrap(), 359.134_205_369_575_4, 1e-15));
        assert!(gamma(-3.0).is_err());
        assert!(ln_gamma(0.0).is_err());
    }

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!(close(digamma(1.0).unwrap(), -euler, 1e-15));
        assert!(close(digamma(0.5).unwrap(), -euler - 2.0 * 2f64.ln(), 1e-15));
        assert!(close(digamma(-0.5).unwrap(), 0.036_489_973_978_576_52, 1e-13));
        assert!(digamma(-2.0).is_err());
    }

    #[test]
    fn complex_matches_real() {
        for x in [0.1, 0.7, 1.0, 3.3, 12.5, 40.0] {
            let z = ln_gamma_complex(Complex64::new(x, 0.0)).unwrap();
            assert!(close(z.re, ln_gamma(x).unwrap(), 1e-14));
            assert!(z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn complex_recurrence() {
        let z = Complex64::new(0.3, 1.7);
        let lhs = (ln_gamma_complex(z + 1.0).unwrap() - ln_gamma_complex(z).unwrap()).exp();
        assert!((lhs - z).norm() < 1e-13);
        // |Gamma(1/2 + i y)|^2 = pi / cosh(pi y)
        let y = 2.5;
        let g = ln_gamma_complex(Complex64::new(0.5, y)).unwrap();
        assert!(close((2.0 * g.re).exp(), PI / (PI * y).cosh(), 1e-13));
    }

    #[test]
    fn falling_factorial() {
        assert_eq!(pochhammer_falling(&5.0f64, 3), 60.0);
        assert_eq!(pochhammer_falling(&0.5f64, 0), 1.0);
        assert_eq!(pochhammer_falling(&2.0f64, 4), 0.0);
    }
}
