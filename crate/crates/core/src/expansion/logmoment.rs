use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::moments::{moment_mu_derivatives, Estimate, KernelSpec, Method, TestFunctionSpec};
use crate::specfun::{bell_inverse, bernoulli_difference, hurwitz_zeta, riemann_zeta, PolynomialQ, RealPoly};

/// One coefficient c_p(l): a real combination of exact rational polynomials in l.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffPoly {
    parts: Vec<(f64, PolynomialQ)>,
    real: RealPoly,
}

impl CoeffPoly {
    pub fn from_parts(parts: Vec<(f64, PolynomialQ)>) -> Self {
        let mut real = RealPoly::default();
        for (w, p) in &parts {
            real.add_scaled(&p.to_real(), *w);
        }
        CoeffPoly { parts, real }
    }

    pub fn from_real(real: RealPoly) -> Self {
        CoeffPoly { parts: Vec::new(), real }
    }

    /// The weighted exact parts; empty when built from floating coefficients.
    pub fn parts(&self) -> &[(f64, PolynomialQ)] {
        &self.parts
    }

    pub fn real(&self) -> &RealPoly {
        &self.real
    }

    pub fn eval(&self, l: f64) -> f64 {
        if self.parts.is_empty() {
            self.real.eval(l)
        } else {
            self.parts.iter().map(|(w, p)| w * p.eval_f64(l)).sum()
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        if self.parts.is_empty() {
            self.real.eval_complex(z)
        } else {
            self.parts.iter().map(|(w, p)| p.eval_complex(z) * *w).sum()
        }
    }
}

/// The coefficients of log S_l(mu) = l log phibar + sum_p mu^p c_p(l).
#[derive(Clone, Debug, PartialEq)]
pub struct LogMomentSeries {
    coefficients: Vec<CoeffPoly>,
    phibar: f64,
}

/// The two exact polynomials of the circle coefficient:
/// (B_{p+1}(l) - B_{p+1})/(p+1) and (B_{p+1}(l+1) - B_{p+1})/(p+1) - l.
pub fn circle_poly_parts(p: usize) -> (PolynomialQ, PolynomialQ) {
    let d = bernoulli_difference(p + 1);
    let shifted = d.shift(&crate::specfun::rat(1, 1)) - PolynomialQ::x();
    (d, shifted)
}

fn circle_weights(p: usize, lambda: f64) -> Result<(f64, f64)> {
    let pp = p as u32;
    let alpha = hurwitz_zeta(pp, 1.0 + 2.0 * lambda)? - 2.0 * hurwitz_zeta(pp, 1.0 + lambda)?;
    let scale = 1.0 / (p as f64 * 2f64.powi(p as i32));
    Ok((alpha * scale, riemann_zeta(pp)? * scale))
}

/// c_p(l) for the circle with test function |1 - e^{2 pi i s}|^{2 lambda}, as a polynomial in l.
pub fn c_closed_circle_poly(p: usize, lambda: f64) -> Result<CoeffPoly> {
    if p == 0 {
        return domain("c_p needs p >= 1");
    }
    if !(lambda >= 0.0) {
        return domain(format!("lambda must be >= 0, got {lambda}"));
    }
    let (wa, wb) = circle_weights(p, lambda)?;
    let (pa, pb) = circle_poly_parts(p);
    Ok(CoeffPoly::from_parts(vec![(wa, pa), (wb, pb)]))
}

/// c_p(l) for the circle evaluated at a real moment order l.
pub fn c_closed_circle(p: usize, l: f64, lambda: f64) -> Result<f64> {
    Ok(c_closed_circle_poly(p, lambda)?.eval(l))
}

impl LogMomentSeries {
    pub fn new(phibar: f64, coefficients: Vec<CoeffPoly>) -> Self {
        LogMomentSeries { coefficients, phibar }
    }

    /// Closed-form series for the circle through `max_order`.
    pub fn circle(lambda: f64, max_order: usize) -> Result<Self> {
        let phibar = TestFunctionSpec::Circular { lambda }.mean()?;
        let coefficients = (1..=max_order)
            .map(|p| c_closed_circle_poly(p, lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(LogMomentSeries { coefficients, phibar })
    }

    pub fn phibar(&self) -> f64 {
        self.phibar
    }

    pub fn max_order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient(&self, p: usize) -> Result<&CoeffPoly> {
        if p == 0 || p > self.coefficients.len() {
            return domain(format!("series holds orders 1..={}, asked for {p}", self.coefficients.len()));
        }
        Ok(&self.coefficients[p - 1])
    }

    pub fn c(&self, p: usize, l: f64) -> Result<f64> {
        Ok(self.coefficient(p)?.eval(l))
    }

    pub fn c_complex(&self, p: usize, q: Complex64) -> Result<Complex64> {
        Ok(self.coefficient(p)?.eval_complex(q))
    }
}

/// Extract c_1(l), ..., c_p(l) from numerically integrated mu-derivatives of S_l.
///
/// Inverts d^n S_l = phibar^l Y_n(1! c_1, ..., n! c_n) order by order and
/// propagates the integration error linearly.
pub fn c_numeric_all(
    p: usize,
    l: usize,
    kernel: &KernelSpec,
    phi: TestFunctionSpec,
    budget: u64,
) -> Result<Vec<Estimate>> {
    if p == 0 || p > 6 {
        return domain(format!("c_numeric supports 1 <= p <= 6, got {p}"));
    }
    if l == 0 || l > 4 {
        return domain(format!("c_numeric supports 1 <= l <= 4, got {l}"));
    }
    let phibar = phi.mean()?;
    let scale = phibar.powi(l as i32);
    if !(scale.is_normal()) || !(1e-100..1e100).contains(&scale) {
        return domain(format!("phibar^l = {scale} is too ill-conditioned"));
    }
    let ds = moment_mu_derivatives(l, p, kernel, phi, Method::Quadrature, budget)?;
    let y: Vec<f64> = ds.iter().map(|e| e.value / scale).collect();
    let ye: Vec<f64> = ds.iter().map(|e| e.error / scale).collect();
    let x = bell_inverse(&y);
    // x_m = Y_{m+1} - sum_k C(m,k) Y_{m-k} x_k
    let mut xe: Vec<f64> = Vec::with_capacity(p);
    for m in 0..p {
        let mut e = ye[m + 1];
        let mut c = 1.0;
        for k in 0..m {
            if k > 0 {
                c = c * (m - k + 1) as f64 / k as f64;
            }
            e += c * (ye[m - k] * x[k].abs() + y[m - k].abs() * xe[k]);
        }
        xe.push(e);
    }
    let mut fact = 1.0;
    Ok((0..p)
        .map(|m| {
            fact *= (m + 1) as f64;
            Estimate {
                value: x[m] / fact,
                error: xe[m] / fact,
                evaluations: ds[0].evaluations,
                method: ds[0].method,
                budget_exceeded: ds[0].budget_exceeded,
            }
        })
        .collect())
}

/// Numerically extracted c_p(l).
pub fn c_numeric(p: usize, l: usize, kernel: &KernelSpec, phi: TestFunctionSpec, budget: u64) -> Result<Estimate> {
    Ok(c_numeric_all(p, l, kernel, phi, budget)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        for l in [0.0, 1.0, 2.0, 3.5] {
            assert!(c_closed_circle(1, l, 0.0).unwrap().abs() < 1e-15);
        }
        for p in 1..10 {
            for lam in [0.0, 0.25, 1.0] {
                assert!(c_closed_circle(p, 1.0, lam).unwrap().abs() < 1e-14);
                assert!(c_closed_circle(p, 0.0, lam).unwrap().abs() < 1e-14);
            }
        }
        assert!((c_closed_circle(2, 2.0, 0.0).unwrap() - PI * PI / 24.0).abs() < 1e-14);
    }

    #[test]
    fn degree_bound() {
        for p in 1..12 {
            let c = c_closed_circle_poly(p, 0.3).unwrap();
            assert!(c.real().degree() <= p + 1);
        }
    }

    #[test]
    fn numeric_interval() {
        let c = c_numeric_all(4, 2, &KernelSpec::Interval, TestFunctionSpec::Constant, 2_000_000).unwrap();
        for (i, e) in c.iter().enumerate() {
            let p = (i + 1) as f64;
            let want = (1.0 + 2f64.powf(-p)) / p;
            assert!((e.value - want).abs() < 1e-8, "p={p}: {} vs {want}", e.value);
            assert!(e.error < 1e-4);
        }
    }
}
