use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quad::de_integrate_inf;
use crate::specfun::{bernoulli_polynomial, digamma, ln_gamma_complex, ln_gamma, rat_to_f64};

/// Series terms kept for the bracket near the origin.
const SERIES_TERMS: usize = 30;
const TOL: f64 = 1e-14;

/// (B_n(q) - B_n) / n! for n = 3..SERIES_TERMS, at complex q.
fn bracket_series(q: Complex64) -> Vec<Complex64> {
    let mut fact = 2.0;
    (3..=SERIES_TERMS)
        .map(|n| {
            fact *= n as f64;
            let b = bernoulli_polynomial(n);
            let b0 = rat_to_f64(&b.coeff(0));
            (b.eval_complex(q) - b0) / fact
        })
        .collect()
}

struct Integrand {
    q: Complex64,
    a: f64,
    tau: f64,
    series: Vec<Complex64>,
    x_series: f64,
}

impl Integrand {
    fn new(q: Complex64, a: f64, tau: f64) -> Self {
        Integrand {
            q,
            a,
            tau,
            series: bracket_series(q),
            x_series: 0.25 / q.norm().max(1.0),
        }
    }

    fn eval(&self, x: f64) -> Complex64 {
        let q = self.q;
        let denom = -x * (-self.tau * x).exp_m1();
        if x < self.x_series {
            // bracket = sum_{n>=3} (B_n(q) - B_n) x^{n-1} / n!
            let mut p = x * x;
            let mut s = Complex64::new(0.0, 0.0);
            for c in &self.series {
                s += c * p;
                p *= x;
            }
            return s * ((-(self.a + self.tau) * x).exp() / denom);
        }
        // e^{-(a+tau)x} [(e^{qx}-1)/(e^x-1) - q - (q^2-q)x/2] without overflow
        let lead = (((q - 1.0 - self.a - self.tau) * x).exp() - (-(1.0 + self.a + self.tau) * x).exp())
            / -(-x).exp_m1();
        let tail = (q + (q * q - q) * x * 0.5) * (-(self.a + self.tau) * x).exp();
        (lead - tail) / denom
    }
}

/// I(q | a, tau) = int_0^inf dx/x e^{-ax}/(e^{x tau}-1) [(e^{xq}-1)/(e^x-1) - q - (q^2-q) x/2].
pub fn i_integral(q: Complex64, a: f64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    if !(a + tau > 0.0) || !(a + tau + 1.0 - q.re > 0.0) {
        return domain(format!("I(q|a,tau) diverges at q={q}, a={a}, tau={tau}"));
    }
    if q == Complex64::new(0.0, 0.0) || q == Complex64::new(1.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let f = Integrand::new(q, a, tau);
    let (re, ere) = de_integrate_inf(|x| f.eval(x).re, 0.0, TOL);
    let (im, eim) = if q.im == 0.0 {
        (0.0, 0.0)
    } else {
        de_integrate_inf(|x| f.eval(x).im, 0.0, TOL)
    };
    let val = Complex64::new(re, im);
    let err = ere.max(eim);
    if !(err <= 1e-9 * val.norm().max(1.0)) {
        return domain(format!("I(q|a,tau) quadrature reached only {err:.3e}"));
    }
    Ok(val)
}

/// log G(1+a+tau | tau) / G(1-q+a+tau | tau).
///
/// For a <= -tau the ratio is continued with G(z+1|tau) = Gamma(z/tau) G(z|tau).
pub fn log_g_ratio(q: Complex64, a: f64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let mut shift = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    while a + shift + tau <= 0.0 || a + shift + tau + 1.0 - q.re <= 0.0 {
        shift += 1.0;
        let z = a + shift;
        acc -= ln_gamma_complex(Complex64::new(1.0 + z / tau, 0.0))? - ln_gamma_complex((z + tau - q) / tau)?;
        if shift > 1e6 {
            return domain("shift continuation did not reach the convergent region");
        }
    }
    let a = a + shift;
    let r = a / tau;
    let base = i_integral(q, a, tau)? + q * ln_gamma(1.0 + r)? - (q * q - q) / (2.0 * tau) * digamma(1.0 + r)?;
    Ok(base + acc)
}
