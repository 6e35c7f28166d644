use super::poly::Ring;

fn binomial_row(n: usize) -> Vec<i64> {
    let mut row = vec![1i64; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as i64 / k as i64;
    }
    row
}

/// Complete Bell polynomials Y_0, ..., Y_n evaluated at x_1, ..., x_n.
///
/// `x[k]` holds x_{k+1}. Uses Y_{m+1} = sum_k C(m,k) Y_{m-k} x_{k+1}.
pub fn bell_sequence<T: Ring>(n: usize, x: &[T]) -> Vec<T> {
    assert!(x.len() >= n, "need {n} arguments, got {}", x.len());
    let mut y = Vec::with_capacity(n + 1);
    y.push(T::one());
    for m in 0..n {
        let c = binomial_row(m);
        let mut s = T::zero();
        for k in 0..=m {
            s = s + T::from_i64(c[k]) * y[m - k].clone() * x[k].clone();
        }
        y.push(s);
    }
    y
}

/// Complete Bell polynomial Y_n(x_1, ..., x_n).
pub fn bell_polynomial<T: Ring>(n: usize, x: &[T]) -> T {
    bell_sequence(n, x).pop().unwrap()
}

/// Recover x_1..x_n from Y_1..Y_n (with Y_0 = 1); `y[k]` holds Y_k.
pub fn bell_inverse(y: &[f64]) -> Vec<f64> {
    let n = y.len() - 1;
    let mut x: Vec<f64> = Vec::with_capacity(n);
    for m in 0..n {
        let c = binomial_row(m);
        let mut s = y[m + 1];
        for k in 0..m {
            s -= c[k] as f64 * y[m - k] * x[k];
        }
        x.push(s);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::poly::{rat, Rational};

    #[test]
    fn small_cases() {
        let x: Vec<Rational> = (1..=4).map(|k| rat(k, 1)).collect();
        // Y_2 = x1^2 + x2, Y_3 = x1^3 + 3 x1 x2 + x3
        assert_eq!(bell_polynomial(2, &x), rat(3, 1));
        assert_eq!(bell_polynomial(3, &x), rat(1 + 6 + 3, 1));
        // all ones gives the Bell numbers
        let ones = vec![1.0f64; 8];
        assert_eq!(bell_sequence(8, &ones), vec![1.0, 1.0, 2.0, 5.0, 15.0, 52.0, 203.0, 877.0, 4140.0]);
    }

    #[test]
    fn inverse_round_trip() {
        let x = vec![0.3, -1.2, 2.5, 0.0, 4.1, -0.7];
        let y = bell_sequence(6, &x);
        let back = bell_inverse(&y);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
