//! Exact rational helpers and the special functions used throughout the crate.

mod bell;
mod bernoulli;
mod gamma;
mod poly;
mod zeta;

pub use bell::{bell_inverse, bell_polynomial, bell_sequence};
pub use bernoulli::{bernoulli_difference, bernoulli_number, bernoulli_polynomial, BernoulliCache, DEFAULT_MAX_DEGREE};
pub use gamma::{digamma, gamma, ln_gamma, ln_gamma_complex, ln_gamma_signed, pochhammer_falling};
pub use poly::{rat, rat_to_f64, PolynomialQ, Rational, RealPoly, Ring};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_real, riemann_zeta};
