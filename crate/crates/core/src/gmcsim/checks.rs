use nalgebra::{DMatrix, DVector};

use super::covariance::covariance_matrix;
use crate::error::{domain, Result};
use crate::moments::KernelSpec;

/// Relative residual of the Girsanov identity for G(X) = exp(beta . X).
///
/// `cov` is the covariance of the centered field X (build at unit mu). The left side
/// E[G(X) prod_i exp(alpha X(y_i) - alpha^2 Var X(y_i) / 2)] is evaluated from the
/// Gaussian moment generating function of beta + alpha sum_i e_{y_i}; the right side
/// exp(alpha^2 sum_{i<j} g(y_i, y_j)) E[G(X + alpha sum_i g(., y_i))] from the shifted
/// functional. Both are exact, so the residual measures rounding only.
pub fn girsanov_check(cov: &DMatrix<f64>, alpha: f64, y: &[usize], beta: &[f64]) -> Result<f64> {
    let n = cov.nrows();
    if beta.len() != n || cov.ncols() != n {
        return domain(format!("beta has {} entries for a {n}x{} covariance", beta.len(), cov.ncols()));
    }
    if y.iter().any(|&i| i >= n) {
        return domain("y index outside the grid");
    }
    let b = DVector::from_column_slice(beta);
    let mut v = b.clone();
    for &i in y {
        v[i] += alpha;
    }
    let var_sum: f64 = y.iter().map(|&i| cov[(i, i)]).sum();
    let lhs_log = 0.5 * v.dot(&(cov * &v)) - 0.5 * alpha * alpha * var_sum;

    let mut shift = DVector::zeros(n);
    for &i in y {
        shift += cov.column(i);
    }
    let mut pair = 0.0;
    for (a, &i) in y.iter().enumerate() {
        for &j in &y[..a] {
            pair += cov[(i, j)];
        }
    }
    let rhs_log = alpha * alpha * pair + alpha * b.dot(&shift) + 0.5 * b.dot(&(cov * &b));
    let (lhs, rhs) = (lhs_log.exp(), rhs_log.exp());
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Max-norm residuals of the means and covariances in the intermittency invariance
/// B(delta) + w_{mu,L,eps} = w_{mu-delta,L,eps} + w'_{delta,Le,eps}.
///
/// w_{m,L,eps} has covariance m (g_eps + log L) and mean minus half its variance;
/// B(delta) adds variance delta and drift -delta/2.
pub fn intermittency_invariance_check(
    mu: f64,
    delta: f64,
    l: f64,
    kernel: &KernelSpec,
    epsilon: f64,
    n: usize,
) -> Result<(f64, f64)> {
    if !(0.0 < delta && delta < mu) {
        return domain(format!("need 0 < delta < mu, got delta={delta}, mu={mu}"));
    }
    if !(l >= 1.0) {
        return domain(format!("L must be >= 1, got {l}"));
    }
    let field = |m: f64, big_l: f64| -> DMatrix<f64> {
        covariance_matrix(kernel, m, epsilon, n).add_scalar(m * big_l.ln())
    };
    let mean = |c: &DMatrix<f64>| -> DVector<f64> { -0.5 * c.diagonal() };

    let lhs_field = field(mu, l);
    let lhs_cov = lhs_field.add_scalar(delta);
    let lhs_mean = mean(&lhs_field).add_scalar(-0.5 * delta);

    let a = field(mu - delta, l);
    let b = field(delta, l * std::f64::consts::E);
    let rhs_cov = &a + &b;
    let rhs_mean = mean(&a) + mean(&b);

    Ok(((lhs_mean - rhs_mean).amax(), (lhs_cov - rhs_cov).amax()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn girsanov_trivial() {
        let c = covariance_matrix(&KernelSpec::Interval, 1.0, 4.0 / 16.0, 16);
        let beta: Vec<f64> = (0..16).map(|i| 0.01 * i as f64 - 0.05).collect();
        assert_eq!(girsanov_check(&c, 0.0, &[3], &beta).unwrap(), 0.0);
        assert!(girsanov_check(&c, 0.7, &[3], &[0.0; 16]).unwrap() < 1e-15);
        assert!(girsanov_check(&c, 0.7, &[3, 9], &beta).unwrap() < 1e-13);
    }

    #[test]
    fn invariance() {
        let (m, c) = intermittency_invariance_check(1.0, 0.3, 1.0, &KernelSpec::Interval, 4.0 / 64.0, 64).unwrap();
        assert!(m < 1e-12 && c < 1e-12, "{m} {c}");
        assert!(intermittency_invariance_check(0.3, 0.5, 1.0, &KernelSpec::Interval, 0.1, 16).is_err());
    }
}
