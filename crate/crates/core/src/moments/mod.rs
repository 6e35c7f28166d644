//! Moment oracles: kernels, test functions, closed-form circle moments and
//! direct numerical integration of moments and their mu-derivatives.

mod kernel;
mod morris;
mod oracle;

pub use kernel::{CustomKernel, KernelSpec, TestFunctionSpec};
pub use morris::morris_moment;
pub use oracle::{
    joint_moment_oracle, joint_mu_derivatives, moment_mu_derivative, moment_mu_derivatives, numeric_moment_oracle,
    Estimate, Method, MomentRequest, DEFAULT_BUDGET, DEFAULT_MC_SEED, MAX_QUADRATURE_ORDER,
};

/// Multifractal exponent zeta(q) = (1 + mu/2) q - mu q^2 / 2.
pub fn multifractal_spectrum(q: f64, mu: f64) -> f64 {
    (1.0 + 0.5 * mu) * q - 0.5 * mu * q * q
}

/// The chaos measure is non-degenerate for 0 <= mu < 2.
pub fn nondegenerate(mu: f64) -> bool {
    (0.0..2.0).contains(&mu)
}
