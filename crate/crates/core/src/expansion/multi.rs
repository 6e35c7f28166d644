use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{domain, Result};
use crate::moments::{joint_mu_derivatives, Estimate, KernelSpec, Method, MAX_QUADRATURE_ORDER};

/// Source of d^n S_{q_1..q_N} / d mu^n at mu = 0 for joint moments over fixed subsets.
pub trait JointDerivativeProvider: Sync {
    /// |D_1|, ..., |D_N|.
    fn measures(&self) -> Vec<f64>;
    fn derivative(&self, orders: &[usize], n: usize) -> Result<Estimate>;
}

/// Joint derivatives by nested quadrature (Monte Carlo above four points), test function 1.
pub struct QuadratureJointProvider {
    kernel: KernelSpec,
    subsets: Vec<(f64, f64)>,
    budget: u64,
    mc_samples: u64,
    mc_seed: u64,
    cache: Mutex<HashMap<Vec<usize>, Vec<Estimate>>>,
}

impl QuadratureJointProvider {
    pub fn new(kernel: KernelSpec, subsets: Vec<(f64, f64)>, budget: u64) -> Self {
        QuadratureJointProvider {
            kernel,
            subsets,
            budget,
            mc_samples: 4_000_000,
            mc_seed: crate::moments::DEFAULT_MC_SEED,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_monte_carlo(mut self, samples: u64, seed: u64) -> Self {
        self.mc_samples = samples;
        self.mc_seed = seed;
        self
    }

    const N_MAX: usize = 6;
}

impl JointDerivativeProvider for QuadratureJointProvider {
    fn measures(&self) -> Vec<f64> {
        self.subsets.iter().map(|(a, b)| b - a).collect()
    }

    fn derivative(&self, orders: &[usize], n: usize) -> Result<Estimate> {
        if orders.len() != self.subsets.len() {
            return domain("one order per subset required");
        }
        let total: usize = orders.iter().sum();
        if total < 2 {
            let v: f64 = self.measures().iter().zip(orders).map(|(m, &q)| m.powi(q as i32)).product();
            return Ok(Estimate::exact(if n == 0 { v } else { 0.0 }));
        }
        if n > Self::N_MAX {
            return domain(format!("derivative order at most {}", Self::N_MAX));
        }
        if let Some(v) = self.cache.lock().unwrap().get(orders) {
            return Ok(v[n].clone());
        }
        let (subsets, used): (Vec<(f64, f64)>, Vec<usize>) = self
            .subsets
            .iter()
            .zip(orders)
            .filter(|(_, &q)| q > 0)
            .map(|(s, &q)| (*s, q))
            .unzip();
        let (method, budget) = if total <= MAX_QUADRATURE_ORDER {
            (Method::Quadrature, self.budget)
        } else {
            (
                Method::MonteCarlo {
                    seed: self.mc_seed.wrapping_add(total as u64),
                },
                self.mc_samples,
            )
        };
        let v = joint_mu_derivatives(&subsets, &used, Self::N_MAX, &self.kernel, method, budget)?;
        let out = v[n].clone();
        self.cache.lock().unwrap().insert(orders.to_vec(), v);
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |c, j| c * (n - j) as f64 / (j + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// H_{n; k_1..k_N}: the multi-binomial transform of joint moment derivatives.
///
/// ((-1)^{sum k}/prod k_j!) sum_{q <= k} (-1)^{sum q} prod |D_j|^{k_j-q_j} C(k_j,q_j) d^n S_q.
pub fn multi_subset_h(n: usize, k: &[usize], provider: &dyn JointDerivativeProvider) -> Result<Estimate> {
    let measures = provider.measures();
    if k.len() != measures.len() {
        return domain(format!("{} orders for {} subsets", k.len(), measures.len()));
    }
    if n == 0 {
        return domain("H needs n >= 1");
    }
    let ksum: usize = k.iter().sum();
    let kfact: f64 = k.iter().map(|&v| factorial(v)).product();
    let mut q = vec![0usize; k.len()];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut mag = 0.0;
    let mut evals = 0;
    let mut exceeded = false;
    let mut method = Method::Exact;
    loop {
        let qsum: usize = q.iter().sum();
        if qsum >= 2 {
            let w: f64 = (0..k.len())
                .map(|j| measures[j].powi((k[j] - q[j]) as i32) * binomial(k[j], q[j]))
                .product::<f64>()
                / kfact;
            let sign = if (ksum + qsum) % 2 == 0 { 1.0 } else { -1.0 };
            let d = provider.derivative(&q, n)?;
            value += sign * w * d.value;
            error += w * d.error;
            mag += w * d.value.abs();
            evals += d.evaluations;
            exceeded |= d.budget_exceeded;
            if d.method != Method::Exact {
                method = d.method;
            }
        }
        // odometer over q <= k
        let mut j = 0;
        while j < k.len() {
            if q[j] < k[j] {
                q[j] += 1;
                break;
            }
            q[j] = 0;
            j += 1;
        }
        if j == k.len() {
            break;
        }
    }
    error += 4.0 * f64::EPSILON * mag;
    Ok(Estimate {
        value,
        error,
        evaluations: evals,
        method,
        budget_exceeded: exceeded,
    })
}
