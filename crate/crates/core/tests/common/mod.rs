//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gmc_core::expansion::circle_poly_parts;
use gmc_core::specfun::{rat, PolynomialQ, Rational};
use num_traits::{One, Zero};

fn truncate(p: &[PolynomialQ], n: usize) -> Vec<PolynomialQ> {
    p.iter().take(n + 1).cloned().collect()
}

fn series_mul(a: &[PolynomialQ], b: &[PolynomialQ], n: usize) -> Vec<PolynomialQ> {
    let mut out = vec![PolynomialQ::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= n {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
    }
    out
}

/// Coefficients e_0..e_n of exp(sum_{r>=1} c_r t^r) by summing S^m / m!; `c[r-1]` is c_r.
pub fn series_exp(c: &[PolynomialQ], n: usize) -> Vec<PolynomialQ> {
    let mut s = vec![PolynomialQ::zero()];
    s.extend(c.iter().cloned());
    let s = truncate(&s, n);
    let mut power = vec![PolynomialQ::one()];
    let mut out = vec![PolynomialQ::zero(); n + 1];
    let mut fact = Rational::one();
    for m in 0..=n {
        if m > 0 {
            power = series_mul(&power, &s, n);
            fact *= Rational::from_integer((m as i64).into());
        }
        let inv = fact.recip();
        for (i, p) in power.iter().enumerate() {
            out[i] = out[i].clone() + p.scale(&inv);
        }
    }
    out
}

/// c_r(q) of the circle with the zeta weights replaced by exact rationals.
pub fn rational_circle_coefficients(weights: &[(Rational, Rational)]) -> Vec<PolynomialQ> {
    weights
        .iter()
        .enumerate()
        .map(|(i, (wa, wb))| {
            let p = i + 1;
            let (pa, pb) = circle_poly_parts(p);
            let scale = rat(1, p as i64 * (1i64 << p));
            (pa.scale(wa) + pb.scale(wb)).scale(&scale)
        })
        .collect()
}

/// Monomials of (sum_{i<j<=k} g_ij)^n that involve every index 1..=k, keyed by the
/// sorted edge list, with their multinomial multiplicities.
pub fn brute_multinomial(n: usize, k: usize) -> BTreeMap<Vec<(usize, usize)>, u64> {
    let pairs: Vec<(usize, usize)> = (1..=k).flat_map(|i| (i + 1..=k).map(move |j| (i, j))).collect();
    let mut out = BTreeMap::new();
    if pairs.is_empty() {
        return out;
    }
    let mut idx = vec![0usize; n];
    loop {
        let mut seen = vec![false; k + 1];
        let mut edges: Vec<(usize, usize)> = idx.iter().map(|&i| pairs[i]).collect();
        for &(a, b) in &edges {
            seen[a] = true;
            seen[b] = true;
        }
        if seen[1..].iter().all(|&s| s) {
            edges.sort_unstable();
            *out.entry(edges).or_insert(0) += 1;
        }
        let mut d = 0;
        while d < n {
            idx[d] += 1;
            if idx[d] < pairs.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == n {
            return out;
        }
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
