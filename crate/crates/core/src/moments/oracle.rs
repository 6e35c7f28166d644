use super::kernel::{KernelSpec, TestFunctionSpec};
use crate::error::{domain, GmcError, Result};
use crate::quad::{monte_carlo, nested_integrate, ConfigIntegrand, Segment, VecEstimate, MAX_OUT};

/// Largest moment order integrated by the nested quadrature; larger orders use Monte Carlo.
pub const MAX_QUADRATURE_ORDER: usize = 4;
pub const DEFAULT_BUDGET: u64 = 20_000_000;
pub const DEFAULT_MC_SEED: u64 = 0x5eed_2024;

/// A numerical estimate with its error bar.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub method: Method,
    /// Set when the requested budget was too small for the coarsest rule.
    pub budget_exceeded: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            error: 0.0,
            evaluations: 0,
            method: Method::Exact,
            budget_exceeded: false,
        }
    }
}

/// How an oracle integral is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Nested quadrature up to order 4, Monte Carlo above.
    Auto,
    /// Nested tanh-sinh over ordered configurations.
    Quadrature,
    /// Stratified Monte Carlo with the given seed.
    MonteCarlo { seed: u64 },
    Exact,
}

/// Moment of the total mass of phi(x) M_mu(dx) over [0, 1].
#[derive(Clone, Debug)]
pub struct MomentRequest {
    pub kernel: KernelSpec,
    pub phi: TestFunctionSpec,
    pub order: usize,
    pub mu: f64,
}

struct MomentIntegrand<'a> {
    kernel: &'a KernelSpec,
    phi: TestFunctionSpec,
    mu: f64,
}

impl ConfigIntegrand for MomentIntegrand<'_> {
    fn outputs(&self) -> usize {
        1
    }
    fn pair(&self, d: f64, dc: f64) -> f64 {
        self.kernel.log_r_pair(d, dc)
    }
    fn point(&self, x: f64, xc: f64) -> f64 {
        self.phi.value(x, xc)
    }
    fn finish(&self, s: f64, w: f64, out: &mut [f64; MAX_OUT]) {
        // weights are non-negative; a zero weight must not meet an overflowing exponential
        out[0] = if w > 0.0 { (w.ln() - self.mu * s).exp() } else { 0.0 };
    }
}

/// Integrates weight * (sum of g over pairs)^k for k = 0..=n, with g = -log r.
struct DerivativeIntegrand<'a> {
    kernel: &'a KernelSpec,
    phi: TestFunctionSpec,
    n: usize,
}

impl ConfigIntegrand for DerivativeIntegrand<'_> {
    fn outputs(&self) -> usize {
        self.n + 1
    }
    fn pair(&self, d: f64, dc: f64) -> f64 {
        -self.kernel.log_r_pair(d, dc)
    }
    fn point(&self, x: f64, xc: f64) -> f64 {
        self.phi.value(x, xc)
    }
    fn finish(&self, s: f64, w: f64, out: &mut [f64; MAX_OUT]) {
        let mut p = w;
        for o in out.iter_mut().take(self.n + 1) {
            *o = p;
            p *= s;
        }
    }
}

fn choose(method: Method, points: usize) -> Result<Method> {
    match method {
        Method::Auto if points <= MAX_QUADRATURE_ORDER => Ok(Method::Quadrature),
        Method::Auto => Ok(Method::MonteCarlo { seed: DEFAULT_MC_SEED }),
        Method::Quadrature if points > crate::quad::MAX_POINTS => {
            domain(format!("quadrature supports at most {} points", crate::quad::MAX_POINTS))
        }
        Method::Exact => domain("exact evaluation is not an oracle method"),
        m => Ok(m),
    }
}

fn run<I: ConfigIntegrand>(f: &I, segs: &[Segment], method: Method, budget: u64) -> Result<(VecEstimate, Method)> {
    let points: usize = segs.iter().map(|s| s.count).sum();
    let m = choose(method, points)?;
    let est = match m {
        Method::MonteCarlo { seed } => monte_carlo(f, segs, budget, seed),
        _ => nested_integrate(f, segs, budget),
    };
    Ok((est, m))
}

fn pick(v: &VecEstimate, i: usize, method: Method) -> Estimate {
    Estimate {
        value: v.value[i],
        error: v.error[i],
        evaluations: v.evaluations,
        method,
        budget_exceeded: v.budget_exceeded,
    }
}

/// Direct numerical evaluation of the n-th moment integral.
///
/// `budget` caps the number of integrand evaluations (quadrature) or is the
/// sample count (Monte Carlo).
pub fn numeric_moment_oracle(req: &MomentRequest, method: Method, budget: u64) -> Result<Estimate> {
    req.phi.validate()?;
    if !(req.mu >= 0.0) {
        return domain(format!("mu must be >= 0, got {}", req.mu));
    }
    if req.order >= 2 && req.mu > 0.0 && req.order as f64 >= 2.0 / req.mu {
        return Err(GmcError::Divergent {
            order: req.order as f64,
            limit: 2.0 / req.mu,
        });
    }
    let f = MomentIntegrand {
        kernel: &req.kernel,
        phi: req.phi,
        mu: req.mu,
    };
    let segs = [Segment {
        start: 0.0,
        end: 1.0,
        count: req.order,
    }];
    let (v, m) = run(&f, &segs, method, budget)?;
    Ok(pick(&v, 0, m))
}

/// d^n S_l / d mu^n at mu = 0 for every n in 0..=n_max, where S_l is the l-th moment.
///
/// This is the integral of prod phi(x_i) times (sum_{i<j} -log r(x_i - x_j))^n.
pub fn moment_mu_derivatives(
    l: usize,
    n_max: usize,
    kernel: &KernelSpec,
    phi: TestFunctionSpec,
    method: Method,
    budget: u64,
) -> Result<Vec<Estimate>> {
    phi.validate()?;
    if n_max + 1 > MAX_OUT {
        return domain(format!("derivative order at most {}", MAX_OUT - 1));
    }
    let f = DerivativeIntegrand { kernel, phi, n: n_max };
    let segs = [Segment {
        start: 0.0,
        end: 1.0,
        count: l,
    }];
    let (v, m) = run(&f, &segs, method, budget)?;
    Ok((0..=n_max).map(|i| pick(&v, i, m)).collect())
}

/// d^n S_l / d mu^n at mu = 0.
pub fn moment_mu_derivative(
    l: usize,
    n: usize,
    kernel: &KernelSpec,
    phi: TestFunctionSpec,
    budget: u64,
) -> Result<Estimate> {
    Ok(moment_mu_derivatives(l, n, kernel, phi, Method::Auto, budget)?.pop().unwrap())
}

fn joint_segments(subsets: &[(f64, f64)], orders: &[usize]) -> Result<Vec<Segment>> {
    if subsets.len() != orders.len() {
        return domain("one order per subset required");
    }
    let mut segs: Vec<Segment> = subsets
        .iter()
        .zip(orders)
        .map(|(&(a, b), &count)| Segment { start: a, end: b, count })
        .collect();
    for s in &segs {
        if !(0.0 <= s.start && s.start < s.end && s.end <= 1.0) {
            return domain(format!("subset [{}, {}] must lie in [0, 1]", s.start, s.end));
        }
    }
    segs.sort_by(|a, b| a.start.total_cmp(&b.start));
    for w in segs.windows(2) {
        if w[1].start < w[0].end {
            return domain("subsets must not overlap");
        }
    }
    Ok(segs)
}

/// E[prod_j M(I_j)^{q_j}] for disjoint intervals I_j (test function 1).
pub fn joint_moment_oracle(
    subsets: &[(f64, f64)],
    orders: &[usize],
    mu: f64,
    kernel: &KernelSpec,
    method: Method,
    budget: u64,
) -> Result<Estimate> {
    let segs = joint_segments(subsets, orders)?;
    let total: usize = orders.iter().sum();
    if total >= 2 && mu > 0.0 && total as f64 >= 2.0 / mu {
        return Err(GmcError::Divergent {
            order: total as f64,
            limit: 2.0 / mu,
        });
    }
    let f = MomentIntegrand {
        kernel,
        phi: TestFunctionSpec::Constant,
        mu,
    };
    let (v, m) = run(&f, &segs, method, budget)?;
    Ok(pick(&v, 0, m))
}

/// mu-derivatives at mu = 0 of the joint moment, for n in 0..=n_max.
pub fn joint_mu_derivatives(
    subsets: &[(f64, f64)],
    orders: &[usize],
    n_max: usize,
    kernel: &KernelSpec,
    method: Method,
    budget: u64,
) -> Result<Vec<Estimate>> {
    let segs = joint_segments(subsets, orders)?;
    if n_max + 1 > MAX_OUT {
        return domain(format!("derivative order at most {}", MAX_OUT - 1));
    }
    let f = DerivativeIntegrand {
        kernel,
        phi: TestFunctionSpec::Constant,
        n: n_max,
    };
    let (v, m) = run(&f, &segs, method, budget)?;
    Ok((0..=n_max).map(|i| pick(&v, i, m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_s2(mu: f64) -> f64 {
        2.0 / ((1.0 - mu) * (2.0 - mu))
    }

    #[test]
    fn interval_second_moment() {
        for mu in [0.0, 0.3, 0.5, 0.8] {
            let req = MomentRequest {
                kernel: KernelSpec::Interval,
                phi: TestFunctionSpec::Constant,
                order: 2,
                mu,
            };
            let e = numeric_moment_oracle(&req, Method::Auto, DEFAULT_BUDGET).unwrap();
            let exact = interval_s2(mu);
            assert!((e.value - exact).abs() < 1e-8 * exact, "mu={mu}: {} vs {exact}", e.value);
            assert!(e.error < 1e-3);
        }
    }

    #[test]
    fn zero_mu_gives_mean_power() {
        let phi = TestFunctionSpec::Beta { lambda1: 0.5, lambda2: 1.0 };
        let req = MomentRequest {
            kernel: KernelSpec::Interval,
            phi,
            order: 3,
            mu: 0.0,
        };
        let e = numeric_moment_oracle(&req, Method::Auto, DEFAULT_BUDGET).unwrap();
        assert!((e.value - phi.mean().unwrap().powi(3)).abs() < 1e-10);
    }

    #[test]
    fn divergence_is_reported() {
        let req = MomentRequest {
            kernel: KernelSpec::Circle,
            phi: TestFunctionSpec::Constant,
            order: 4,
            mu: 0.5,
        };
        assert!(matches!(numeric_moment_oracle(&req, Method::Auto, 1000), Err(GmcError::Divergent { .. })));
    }

    #[test]
    fn first_derivative_interval() {
        // int int -log|x-y| = 3/2
        let e = moment_mu_derivative(2, 1, &KernelSpec::Interval, TestFunctionSpec::Constant, DEFAULT_BUDGET).unwrap();
        assert!((e.value - 1.5).abs() < 1e-10);
        // int int log^2|x-y| = 7/2
        let e = moment_mu_derivative(2, 2, &KernelSpec::Interval, TestFunctionSpec::Constant, DEFAULT_BUDGET).unwrap();
        assert!((e.value - 3.5).abs() < 1e-9);
    }

    #[test]
    fn joint_reduces_to_single() {
        let whole = joint_moment_oracle(&[(0.0, 1.0)], &[2], 0.4, &KernelSpec::Interval, Method::Auto, DEFAULT_BUDGET)
            .unwrap();
        assert!((whole.value - interval_s2(0.4)).abs() < 1e-8);
        // E[M(A) M(B)] for A = [0,1/2), B = [1/2,1]: halves of the total second moment by symmetry
        let a = joint_moment_oracle(&[(0.0, 0.5)], &[2], 0.4, &KernelSpec::Interval, Method::Auto, DEFAULT_BUDGET)
            .unwrap();
        let ab = joint_moment_oracle(
            &[(0.0, 0.5), (0.5, 1.0)],
            &[1, 1],
            0.4,
            &KernelSpec::Interval,
            Method::Auto,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!((2.0 * a.value + 2.0 * ab.value - whole.value).abs() < 1e-8);
        assert!(joint_moment_oracle(&[(0.0, 0.6), (0.5, 1.0)], &[1, 1], 0.4, &KernelSpec::Interval, Method::Auto, 10)
            .is_err());
    }
}
