use num_complex::Complex64;

use super::logmoment::LogMomentSeries;
use crate::error::{domain, GmcError, Result};
use crate::specfun::Ring;

/// f_0..f_{n_max} from f_{n+1} = sum_{r=0}^n n!/(n-r)! f_{n-r} (r+1) c_{r+1}.
///
/// `c[r]` holds c_{r+1}(q); generic so that exact and symbolic callers share it.
pub fn f_recurrence<T: Ring>(n_max: usize, f0: T, c: &[T]) -> Result<Vec<T>> {
    if c.len() < n_max {
        return domain(format!("need {n_max} coefficients, got {}", c.len()));
    }
    let mut f = Vec::with_capacity(n_max + 1);
    f.push(f0);
    for n in 0..n_max {
        let mut acc = T::zero();
        // n!/(n-r)! grows as r increases
        let mut ff: i64 = 1;
        for r in 0..=n {
            if r > 0 {
                ff *= (n - r + 1) as i64;
            }
            acc = acc + f[n - r].clone() * c[r].clone() * T::from_i64(ff * (r as i64 + 1));
        }
        f.push(acc);
    }
    Ok(f)
}

/// f_n(q) for real q.
pub fn f_coefficients(n_max: usize, q: f64, series: &LogMomentSeries) -> Result<Vec<f64>> {
    let c = (1..=n_max).map(|p| series.c(p, q)).collect::<Result<Vec<_>>>()?;
    f_recurrence(n_max, series.phibar().powf(q), &c)
}

/// f_n(q) for complex q.
pub fn f_coefficients_complex(n_max: usize, q: Complex64, series: &LogMomentSeries) -> Result<Vec<Complex64>> {
    let c = (1..=n_max).map(|p| series.c_complex(p, q)).collect::<Result<Vec<_>>>()?;
    let f0 = (q * series.phibar().ln()).exp();
    f_recurrence(n_max, f0, &c)
}

/// Truncated intermittency expansion of E[M^q] together with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinSeries {
    /// phibar^q exp(sum_{r<=P} mu^r c_r(q)).
    pub exp_form: f64,
    /// sum_{n<=P} mu^n f_n(q) / n!.
    pub term_by_term: f64,
    /// mu^r c_r(q) for r = 1..=P, the terms of the log series.
    pub log_terms: Vec<f64>,
    /// Index r of the smallest |mu^r c_r(q)| and its magnitude.
    pub smallest_term: (usize, f64),
}

/// Partial sums of the Mellin series at order `order`.
pub fn mellin_series(q: f64, mu: f64, series: &LogMomentSeries, order: usize) -> Result<MellinSeries> {
    if order > series.max_order() {
        return domain(format!("order {order} exceeds series order {}", series.max_order()));
    }
    let log_terms = (1..=order)
        .map(|r| Ok(mu.powi(r as i32) * series.c(r, q)?))
        .collect::<Result<Vec<_>>>()?;
    let base = series.phibar().powf(q);
    let exp_form = base * log_terms.iter().sum::<f64>().exp();
    let f = f_coefficients(order, q, series)?;
    let mut term_by_term = 0.0;
    let mut w = 1.0;
    for (n, fv) in f.iter().enumerate() {
        if n > 0 {
            w *= mu / n as f64;
        }
        term_by_term += w * fv;
    }
    // terms that vanish identically (c_1 on the circle) carry no truncation information
    let floor = 1e-12 * log_terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let smallest_term = log_terms
        .iter()
        .enumerate()
        .map(|(i, t)| (i + 1, t.abs()))
        .filter(|t| t.1 > floor)
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    Ok(MellinSeries {
        exp_form,
        term_by_term,
        log_terms,
        smallest_term,
    })
}

/// Highest derivative of F consumed when building F_0..F_{n_max}.
pub fn required_derivatives(n_max: usize, series: &LogMomentSeries) -> Result<usize> {
    let mut need = vec![0usize; n_max + 1];
    for n in 0..n_max {
        let mut m = 0;
        for r in 0..=n {
            m = m.max(series.coefficient(r + 1)?.real().degree() + need[n - r]);
        }
        need[n + 1] = m;
    }
    Ok(need[n_max])
}

/// F_0(a,s)..F_{n_max}(a,s) for E[F(s + a log M)]-type expansions.
///
/// `f_derivs[j]` is F^{(j)}(s). Each F_n is carried as a table of its own
/// derivatives; c(aD) acts on a table by sum_m c_m a^m shifted by m.
pub fn general_transform(f_derivs: &[f64], a: f64, n_max: usize, series: &LogMomentSeries) -> Result<Vec<f64>> {
    if n_max > series.max_order() {
        return domain(format!("order {n_max} exceeds series order {}", series.max_order()));
    }
    let needed = required_derivatives(n_max, series)? + 1;
    if f_derivs.len() < needed {
        return Err(GmcError::InsufficientDerivatives {
            needed,
            got: f_derivs.len(),
        });
    }
    let ops: Vec<Vec<f64>> = (1..=n_max)
        .map(|p| {
            let c = series.coefficient(p)?.real();
            Ok(c.coeffs.iter().take(c.degree() + 1).enumerate().map(|(m, v)| v * a.powi(m as i32)).collect())
        })
        .collect::<Result<_>>()?;
    let mut tables: Vec<Vec<f64>> = vec![f_derivs.to_vec()];
    for n in 0..n_max {
        let len = (0..=n)
            .map(|r| tables[n - r].len().saturating_sub(ops[r].len().saturating_sub(1)))
            .min()
            .unwrap_or(0);
        let mut next = vec![0.0; len];
        let mut ff = 1.0;
        for r in 0..=n {
            if r > 0 {
                ff *= (n - r + 1) as f64;
            }
            let w = ff * (r + 1) as f64;
            let src = &tables[n - r];
            for (j, out) in next.iter_mut().enumerate() {
                let v: f64 = ops[r].iter().enumerate().map(|(m, cm)| cm * src[m + j]).sum();
                *out += w * v;
            }
        }
        tables.push(next);
    }
    Ok(tables.iter().map(|t| t[0]).collect())
}
