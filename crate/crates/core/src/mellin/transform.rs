use num_complex::Complex64;

use super::integral::log_g_ratio;
use crate::error::{domain, GmcError, Result};
use crate::specfun::{bernoulli_difference, hurwitz_zeta, ln_gamma, ln_gamma_complex, riemann_zeta, PolynomialQ};

/// Parameters of the Morris and Selberg Mellin transforms; tau = 2/mu.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinParams {
    pub tau: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub q: Complex64,
}

impl MellinParams {
    pub fn new(q: f64, tau: f64, lambda1: f64, lambda2: f64) -> Self {
        MellinParams {
            tau,
            lambda1,
            lambda2,
            q: Complex64::new(q, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 1.0) {
            return domain(format!("tau must exceed 1, got {}", self.tau));
        }
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) {
            return domain("lambda1 and lambda2 must be >= 0");
        }
        if !(self.q.re < self.tau) {
            return Err(GmcError::Divergent {
                order: self.q.re,
                limit: self.tau,
            });
        }
        Ok(())
    }
}

/// The four G-ratios of the Morris transform, without the Gamma(1-1/tau)^{-q} factor.
fn morris_ratios(q: Complex64, tau: f64, l1: f64, l2: f64) -> Result<Complex64> {
    Ok(log_g_ratio(q, tau * (l1 + l2), tau)? + log_g_ratio(q, -1.0, tau)?
        - log_g_ratio(q, tau * l1, tau)?
        - log_g_ratio(q, tau * l2, tau)?)
}

/// log of the Morris Mellin transform.
pub fn log_morris_mellin(p: &MellinParams) -> Result<Complex64> {
    p.validate()?;
    Ok(morris_ratios(p.q, p.tau, p.lambda1, p.lambda2)? - p.q * ln_gamma(1.0 - 1.0 / p.tau)?)
}

/// Mellin transform E[M^q] of the Morris integral distribution.
pub fn morris_mellin(p: &MellinParams) -> Result<Complex64> {
    Ok(log_morris_mellin(p)?.exp())
}

fn selberg_uncalibrated(q: Complex64, tau: f64, l1: f64, l2: f64) -> Result<Complex64> {
    let a0 = 1.0 + tau * (1.0 + l1 + l2);
    // Gamma_2(2-q+T)/Gamma_2(2-2q+T) split into two ratios with fixed a
    let doubled = log_g_ratio(q * 2.0, a0, tau)? - log_g_ratio(q, a0, tau)?;
    let pre = (2.0 * std::f64::consts::PI).ln() + tau.ln() / tau - ln_gamma(1.0 - 1.0 / tau)?;
    Ok(q * pre + log_g_ratio(q, tau * l1, tau)? + log_g_ratio(q, tau * l2, tau)? + log_g_ratio(q, -1.0, tau)?
        - doubled)
}

/// log of the Selberg Mellin transform, normalized so that q = 1 gives the beta integral.
pub fn log_selberg_mellin(p: &MellinParams) -> Result<Complex64> {
    p.validate()?;
    let (l1, l2) = (p.lambda1, p.lambda2);
    let beta = ln_gamma(1.0 + l1)? + ln_gamma(1.0 + l2)? - ln_gamma(2.0 + l1 + l2)?;
    let kappa = beta - selberg_uncalibrated(Complex64::new(1.0, 0.0), p.tau, l1, l2)?.re;
    Ok(selberg_uncalibrated(p.q, p.tau, l1, l2)? + p.q * kappa)
}

/// Mellin transform of the Selberg integral distribution.
pub fn selberg_mellin(p: &MellinParams) -> Result<Complex64> {
    Ok(log_selberg_mellin(p)?.exp())
}

/// The exact rational parts of the p-th asymptotic coefficient:
/// (B_{p+1}(q) - B_{p+1})/(p+1) and (B_{p+1}(q+1) - B_{p+1})/(p+1) - q.
fn asymptotic_parts(p: usize) -> (PolynomialQ, PolynomialQ) {
    let d = bernoulli_difference(p + 1);
    let shifted = d.shift(&crate::specfun::rat(1, 1)) - PolynomialQ::x();
    (d, shifted)
}

/// Coefficient of tau^{-p} in the asymptotic expansion of log M.
pub fn asymptotic_coefficient(p: usize, q: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if p == 0 {
        return Ok(q * (ln_gamma(1.0 + lambda1 + lambda2)? - ln_gamma(1.0 + lambda1)? - ln_gamma(1.0 + lambda2)?));
    }
    let pp = p as u32;
    let w = hurwitz_zeta(pp, 1.0 + lambda1 + lambda2)? - hurwitz_zeta(pp, 1.0 + lambda1)? - hurwitz_zeta(pp, 1.0 + lambda2)?;
    let (pa, pb) = asymptotic_parts(p);
    Ok((w * pa.eval_f64(q) + riemann_zeta(pp)? * pb.eval_f64(q)) / p as f64)
}

/// Partial sum of the asymptotic expansion together with smallest-term diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSum {
    /// Constant term plus sum_{p<=P} tau^{-p} coefficient_p.
    pub value: f64,
    /// tau^{-p} coefficient_p for p = 1..=P.
    pub terms: Vec<f64>,
    /// Order of the smallest term and its magnitude; summing to it is the usual optimal truncation.
    pub smallest_term: (usize, f64),
    /// Partial sum truncated just before the smallest term.
    pub optimally_truncated: f64,
}

/// Largest order accepted by `asymptotic_logm`.
pub const MAX_ASYMPTOTIC_ORDER: usize = 30;

pub fn asymptotic_logm(q: f64, tau: f64, lambda1: f64, lambda2: f64, order: usize) -> Result<AsymptoticSum> {
    if order > MAX_ASYMPTOTIC_ORDER {
        return domain(format!("order at most {MAX_ASYMPTOTIC_ORDER}"));
    }
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let c0 = asymptotic_coefficient(0, q, lambda1, lambda2)?;
    let terms = (1..=order)
        .map(|p| Ok(asymptotic_coefficient(p, q, lambda1, lambda2)? * tau.powi(-(p as i32))))
        .collect::<Result<Vec<f64>>>()?;
    // terms that vanish identically (c_1 on the circle) carry no truncation information
    let floor = 1e-12 * terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let smallest_term = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (i + 1, t.abs()))
        .filter(|t| t.1 > floor)
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let cut = smallest_term.0.saturating_sub(1);
    Ok(AsymptoticSum {
        value: c0 + terms.iter().sum::<f64>(),
        optimally_truncated: c0 + terms[..cut].iter().sum::<f64>(),
        terms,
        smallest_term,
    })
}

fn pole_check(z: f64, factor: &'static str) -> Result<()> {
    if z <= 0.0 && z == z.round() {
        return Err(GmcError::Pole {
            factor,
            index: 0,
            argument: z,
        });
    }
    Ok(())
}

/// log[M(q|tau) (2 pi)^{-q} Gamma(1-1/tau)^q] for the circle with (2 pi)^q-normalized M.
///
/// The Gamma(1-1/tau)^q factor cancels exactly, so tau < 1 is allowed here.
fn dual_side(q: f64, tau: f64) -> Result<Complex64> {
    let qc = Complex64::new(q, 0.0);
    pole_check(1.0 - q, "Gamma(1-q)")?;
    Ok(morris_ratios(qc, tau, 0.0, 0.0)? + ln_gamma_complex(Complex64::new(1.0 - q, 0.0))?)
}

/// |LHS - RHS| of the involution identity tau -> 1/tau, q -> q/tau for the circle transform.
pub fn self_duality_residual(q: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let lhs = dual_side(q / tau, 1.0 / tau)?.exp();
    let rhs = dual_side(q, tau)?.exp();
    Ok((lhs - rhs).norm())
}
