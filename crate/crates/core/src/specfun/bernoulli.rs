use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{PolynomialQ, Rational};

pub const DEFAULT_MAX_DEGREE: usize = 32;

/// Exact Bernoulli numbers and polynomials up to a fixed degree, computed once.
///
/// Uses the convention B_1 = -1/2, so that B_n(x) = sum_k C(n,k) B_k x^{n-k}.
#[derive(Debug, Clone)]
pub struct BernoulliCache {
    numbers: Vec<Rational>,
    polys: Vec<PolynomialQ>,
}

impl BernoulliCache {
    pub fn new(max_degree: usize) -> Self {
        let numbers = bernoulli_numbers(max_degree);
        let polys = (0..=max_degree).map(|n| build_poly(n, &numbers)).collect();
        BernoulliCache { numbers, polys }
    }

    pub fn max_degree(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn number(&self, n: usize) -> Option<&Rational> {
        self.numbers.get(n)
    }

    pub fn poly(&self, n: usize) -> Option<&PolynomialQ> {
        self.polys.get(n)
    }
}

fn binomials(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

fn bernoulli_numbers(max: usize) -> Vec<Rational> {
    // sum_{k=0}^{m} C(m+1,k) B_k = 0
    let mut b: Vec<Rational> = Vec::with_capacity(max + 1);
    b.push(Rational::one());
    for m in 1..=max {
        let c = binomials(m + 1);
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from_integer(c[k].clone()) * bk;
        }
        b.push(-s / Rational::from_integer(c[m].clone()));
    }
    b
}

fn build_poly(n: usize, numbers: &[Rational]) -> PolynomialQ {
    let c = binomials(n);
    let mut coeffs = vec![Rational::zero(); n + 1];
    for k in 0..=n {
        coeffs[n - k] = Rational::from_integer(c[k].clone()) * &numbers[k];
    }
    PolynomialQ::new(coeffs)
}

fn default_cache() -> &'static BernoulliCache {
    static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
    CACHE.get_or_init(|| BernoulliCache::new(DEFAULT_MAX_DEGREE))
}

/// Exact Bernoulli polynomial B_n(x). Degrees above the cache are built on demand.
pub fn bernoulli_polynomial(n: usize) -> PolynomialQ {
    match default_cache().poly(n) {
        Some(p) => p.clone(),
        None => {
            let nums = bernoulli_numbers(n);
            build_poly(n, &nums)
        }
    }
}

/// Exact Bernoulli number B_n with B_1 = -1/2.
pub fn bernoulli_number(n: usize) -> Rational {
    match default_cache().number(n) {
        Some(b) => b.clone(),
        None => bernoulli_numbers(n).pop().unwrap(),
    }
}

/// (B_{m}(x) - B_{m}) / m, the polynomial that turns up in every log-moment coefficient.
pub fn bernoulli_difference(m: usize) -> PolynomialQ {
    assert!(m >= 1);
    let p = bernoulli_polynomial(m) - PolynomialQ::constant(bernoulli_number(m));
    p.scale(&Rational::new(BigInt::one(), BigInt::from(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::poly::rat;

    #[test]
    fn known_numbers() {
        assert_eq!(bernoulli_number(0), rat(1, 1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(3), rat(0, 1));
        assert_eq!(bernoulli_number(4), rat(-1, 30));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
        // beyond the default cache
        assert_eq!(bernoulli_number(34), Rational::new(BigInt::from(2577687858367i64), BigInt::from(6)));
    }

    #[test]
    fn b3_closed_form() {
        // B_3(x) = x^3 - 3/2 x^2 + 1/2 x
        let p = bernoulli_polynomial(3);
        assert_eq!(p, PolynomialQ::new(vec![rat(0, 1), rat(1, 2), rat(-3, 2), rat(1, 1)]));
    }

    #[test]
    fn forward_difference_identity() {
        // B_n(x+1) - B_n(x) = n x^{n-1}
        for n in 1..=20usize {
            let p = bernoulli_polynomial(n);
            let d = p.shift(&rat(1, 1)) - p;
            let mut want = vec![Rational::zero(); n];
            want[n - 1] = rat(n as i64, 1);
            assert_eq!(d, PolynomialQ::new(want), "n = {n}");
        }
    }

    #[test]
    fn custom_cache_agrees() {
        let c = BernoulliCache::new(8);
        assert_eq!(c.max_degree(), 8);
        assert_eq!(c.poly(7).unwrap(), &bernoulli_polynomial(7));
    }
}
