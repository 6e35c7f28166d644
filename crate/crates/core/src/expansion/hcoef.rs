use std::collections::HashMap;
use std::sync::Mutex;

use super::logmoment::LogMomentSeries;
use crate::error::{domain, Result};
use crate::moments::{moment_mu_derivatives, Estimate, KernelSpec, Method, TestFunctionSpec, MAX_QUADRATURE_ORDER};
use crate::specfun::bell_polynomial;

/// Source of d^n S_l / d mu^n at mu = 0.
pub trait DerivativeProvider: Sync {
    fn phibar(&self) -> f64;
    fn derivative(&self, l: usize, n: usize) -> Result<Estimate>;
    fn label(&self) -> &'static str;
}

fn trivial_derivative(phibar: f64, l: usize, n: usize) -> Option<Estimate> {
    // no pairs below two points: S_0 = 1 and S_1 = phibar for every mu
    if l < 2 {
        Some(Estimate::exact(if n == 0 { phibar.powi(l as i32) } else { 0.0 }))
    } else {
        None
    }
}

/// Derivatives from direct integration: nested quadrature for l <= 4, Monte Carlo above.
///
/// Results are memoized per l; the table is shared between threads.
pub struct QuadratureProvider {
    kernel: KernelSpec,
    phi: TestFunctionSpec,
    phibar: f64,
    budget: u64,
    mc_samples: u64,
    mc_seed: u64,
    cache: Mutex<HashMap<usize, Vec<Estimate>>>,
}

impl QuadratureProvider {
    pub fn new(kernel: KernelSpec, phi: TestFunctionSpec, budget: u64) -> Result<Self> {
        let phibar = phi.mean()?;
        Ok(QuadratureProvider {
            kernel,
            phi,
            phibar,
            budget,
            mc_samples: 4_000_000,
            mc_seed: crate::moments::DEFAULT_MC_SEED,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Sample count and seed used for moment orders above the quadrature limit.
    pub fn with_monte_carlo(mut self, samples: u64, seed: u64) -> Self {
        self.mc_samples = samples;
        self.mc_seed = seed;
        self
    }

    /// Highest derivative order computed per moment in one pass.
    const N_MAX: usize = 6;
}

impl DerivativeProvider for QuadratureProvider {
    fn phibar(&self) -> f64 {
        self.phibar
    }

    fn label(&self) -> &'static str {
        "quadrature"
    }

    fn derivative(&self, l: usize, n: usize) -> Result<Estimate> {
        if let Some(e) = trivial_derivative(self.phibar, l, n) {
            return Ok(e);
        }
        if n > Self::N_MAX {
            return domain(format!("derivative order at most {}", Self::N_MAX));
        }
        if let Some(v) = self.cache.lock().unwrap().get(&l) {
            return Ok(v[n].clone());
        }
        let (method, budget) = if l <= MAX_QUADRATURE_ORDER {
            (Method::Quadrature, self.budget)
        } else {
            (
                Method::MonteCarlo {
                    seed: self.mc_seed.wrapping_add(l as u64),
                },
                self.mc_samples,
            )
        };
        let v = moment_mu_derivatives(l, Self::N_MAX, &self.kernel, self.phi, method, budget)?;
        let out = v[n].clone();
        self.cache.lock().unwrap().insert(l, v);
        Ok(out)
    }
}

/// Derivatives from the log-moment coefficients through complete Bell polynomials.
pub struct BellProvider {
    series: LogMomentSeries,
}

impl BellProvider {
    pub fn new(series: LogMomentSeries) -> Self {
        BellProvider { series }
    }
}

impl DerivativeProvider for BellProvider {
    fn phibar(&self) -> f64 {
        self.series.phibar()
    }

    fn label(&self) -> &'static str {
        "closed_form"
    }

    fn derivative(&self, l: usize, n: usize) -> Result<Estimate> {
        if let Some(e) = trivial_derivative(self.phibar(), l, n) {
            return Ok(e);
        }
        let mut x = Vec::with_capacity(n);
        let mut fact = 1.0;
        for p in 1..=n {
            fact *= p as f64;
            x.push(fact * self.series.c(p, l as f64)?);
        }
        let value = self.phibar().powi(l as i32) * bell_polynomial(n, &x);
        let mut e = Estimate::exact(value);
        e.error = 1e-14 * value.abs().max(1.0);
        Ok(e)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// H_{n,k}: the binomial transform of the mu-derivatives of the moments.
///
/// H_{n,k} = ((-1)^k / k!) sum_{l=2}^k (-1)^l C(k,l) phibar^{k-l} d^n S_l.
pub fn h_coefficient(n: usize, k: usize, provider: &dyn DerivativeProvider) -> Result<Estimate> {
    if n == 0 || k < 2 {
        return domain(format!("H_(n,k) needs n >= 1 and k >= 2, got ({n}, {k})"));
    }
    let phibar = provider.phibar();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    let mut exceeded = false;
    let mut method = Method::Exact;
    for l in 2..=k {
        let d = provider.derivative(l, n)?;
        let w = binomial(k, l) * phibar.powi((k - l) as i32) / factorial(k);
        let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
        value += sign * w * d.value;
        error += w * d.error;
        evals += d.evaluations;
        exceeded |= d.budget_exceeded;
        if d.method != Method::Exact {
            method = d.method;
        }
    }
    // rounding floor of the alternating sum
    let mag: f64 = (2..=k).map(|l| binomial(k, l)).sum::<f64>() / factorial(k);
    error += 4.0 * f64::EPSILON * mag * value.abs().max(1.0);
    Ok(Estimate {
        value,
        error,
        evaluations: evals,
        method,
        budget_exceeded: exceeded,
    })
}

/// H_{n,k} for 1 <= n <= n_max and 2 <= k <= k_max from the A/B recurrence in c_p(l):
///
/// H_{n+1,k} = phibar^k A_{n,k} + sum_{r<n} C(n,r) sum_{t=2}^k phibar^{k-t} H_{n-r,t} B_{r,t,k}.
///
/// Returned as `table[n][k]` (entries with n = 0 or k < 2 are zero).
pub fn h_recurrence_table(n_max: usize, k_max: usize, series: &LogMomentSeries) -> Result<Vec<Vec<f64>>> {
    let phibar = series.phibar();
    let mut c = vec![vec![0.0; k_max + 1]; n_max + 1];
    for (p, row) in c.iter_mut().enumerate().skip(1) {
        for (l, v) in row.iter_mut().enumerate() {
            *v = series.c(p, l as f64)?;
        }
    }
    let a = |n: usize, k: usize| -> f64 {
        let s: f64 = (2..=k)
            .map(|l| if l % 2 == 0 { 1.0 } else { -1.0 } * binomial(k, l) * c[n + 1][l])
            .sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * factorial(n + 1) / factorial(k) * s
    };
    let b = |r: usize, t: usize, k: usize| -> f64 {
        let s: f64 = (t..=k)
            .map(|l| if l % 2 == 0 { 1.0 } else { -1.0 } * binomial(k, l) * binomial(l, t) * c[r + 1][l])
            .sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * factorial(t) * factorial(r + 1) / factorial(k) * s
    };
    let mut h = vec![vec![0.0; k_max + 1]; n_max + 1];
    for n in 0..n_max {
        for k in 2..=k_max {
            let mut v = phibar.powi(k as i32) * a(n, k);
            for r in 0..n {
                for t in 2..=k {
                    v += binomial(n, r) * phibar.powi((k - t) as i32) * h[n - r][t] * b(r, t, k);
                }
            }
            h[n + 1][k] = v;
        }
    }
    Ok(h)
}
