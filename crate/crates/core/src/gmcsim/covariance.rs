use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{domain, GmcError, Result};
use crate::moments::KernelSpec;

/// Largest diagonal jitter accepted by the dense factorization, relative to trace/N.
pub const MAX_JITTER: f64 = 1e-8;
/// Largest negative spectral mass dropped by the circulant factorization, relative to the trace.
pub const MAX_CLIPPED: f64 = 1e-2;

/// How the covariance square root was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// mu = 0: the field vanishes.
    Zero,
    /// Lower Cholesky factor of cov + jitter I.
    Dense(DMatrix<f64>),
    /// sqrt(max(lambda_k, 0) / N) for the eigenvalues of a circulant covariance.
    Circulant(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorDiagnostics {
    pub method: &'static str,
    /// Diagonal jitter added before the Cholesky factorization succeeded.
    pub jitter: f64,
    /// Sum of |lambda_k| over negative circulant eigenvalues that were set to zero.
    pub clipped_mass: f64,
    pub min_eigenvalue: Option<f64>,
    pub trace: f64,
}

/// The regularized covariance of the field on an N-point grid of [0, 1).
#[derive(Clone, Debug)]
pub struct CovarianceGrid {
    pub grid: Vec<f64>,
    pub epsilon: f64,
    pub mu: f64,
    pub kernel: KernelSpec,
    pub cov: DMatrix<f64>,
    /// -cov[i][i] / 2.
    pub mean: Vec<f64>,
    pub factor: Factor,
    /// Diagonal of factor * factor^T; the sampler centers with -realized/2.
    pub realized_variance: Vec<f64>,
    pub diagnostics: FactorDiagnostics,
}

/// g_eps(d) = -log r(d) for eps <= d, and the linear continuation of the cone construction below eps.
pub fn regularized_log_cov(kernel: &KernelSpec, epsilon: f64, d: f64) -> f64 {
    let d = if kernel.is_periodic() {
        let m = d.rem_euclid(1.0);
        m.min(1.0 - m)
    } else {
        d.abs()
    };
    if d >= epsilon {
        -kernel.log_r_pair(d, 1.0 - d)
    } else {
        -kernel.log_r(epsilon) + (1.0 - d / epsilon) * epsilon * kernel.dlog_r(epsilon)
    }
}

/// Covariance of the field on the grid s_i = i/N, without factorization.
pub fn covariance_matrix(kernel: &KernelSpec, mu: f64, epsilon: f64, n: usize) -> DMatrix<f64> {
    let row: Vec<f64> = (0..n)
        .map(|k| mu * regularized_log_cov(kernel, epsilon, k as f64 / n as f64))
        .collect();
    DMatrix::from_fn(n, n, |i, j| row[i.abs_diff(j)])
}

fn validate(kernel: &KernelSpec, mu: f64, epsilon: f64, n: usize) -> Result<()> {
    if n < 2 {
        return domain("grid needs at least 2 points");
    }
    if !(0.0..2.0).contains(&mu) {
        return domain(format!("mu must lie in [0, 2), got {mu}"));
    }
    if !(epsilon * n as f64 >= 1.0 - 1e-12) || !(epsilon < 0.5) {
        return domain(format!("epsilon must satisfy 1/N <= epsilon < 1/2, got {epsilon} with N = {n}"));
    }
    if let KernelSpec::Custom(_) = kernel {
        // custom kernels are trusted only where they were validated
        let v = kernel.log_r(epsilon);
        if !v.is_finite() {
            return Err(GmcError::InvalidKernel(format!("log r({epsilon}) is not finite")));
        }
    }
    Ok(())
}

fn circulant_factor(first_row: &[f64]) -> Result<(Vec<f64>, FactorDiagnostics)> {
    let n = first_row.len();
    let mut buf: Vec<Complex64> = first_row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let trace = first_row[0] * n as f64;
    let mut clipped = 0.0;
    let mut min_eig = f64::INFINITY;
    let roots = buf
        .iter()
        .map(|c| {
            min_eig = min_eig.min(c.re);
            if c.re < 0.0 {
                clipped += -c.re;
                0.0
            } else {
                (c.re / n as f64).sqrt()
            }
        })
        .collect();
    if clipped > MAX_CLIPPED * trace.abs() {
        return Err(GmcError::NonPsd {
            jitter: clipped,
            limit: MAX_CLIPPED * trace.abs(),
        });
    }
    Ok((
        roots,
        FactorDiagnostics {
            method: "circulant",
            jitter: 0.0,
            clipped_mass: clipped,
            min_eigenvalue: Some(min_eig),
            trace,
        },
    ))
}

fn dense_factor(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, FactorDiagnostics)> {
    let n = cov.nrows();
    let trace = cov.trace();
    let scale = trace / n as f64;
    let mut jitter = 0.0;
    let mut step = 1e-14 * scale;
    loop {
        let mut m = cov.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = m.cholesky() {
            return Ok((
                ch.l(),
                FactorDiagnostics {
                    method: "cholesky",
                    jitter,
                    clipped_mass: 0.0,
                    min_eigenvalue: None,
                    trace,
                },
            ));
        }
        if step > MAX_JITTER * scale {
            return Err(GmcError::NonPsd {
                jitter: step,
                limit: MAX_JITTER * scale,
            });
        }
        jitter = step;
        step *= 10.0;
    }
}

/// Build the regularized covariance of the field on N grid points and factor it.
///
/// Periodic kernels give a circulant matrix whose square root comes from its
/// spectrum; negative eigenvalues are clipped if their total mass stays below
/// `MAX_CLIPPED * trace`. Other kernels use Cholesky with escalating jitter.
pub fn build_covariance(kernel: &KernelSpec, mu: f64, epsilon: f64, n: usize) -> Result<CovarianceGrid> {
    validate(kernel, mu, epsilon, n)?;
    let cov = covariance_matrix(kernel, mu, epsilon, n);
    let mean = (0..n).map(|i| -0.5 * cov[(i, i)]).collect();
    let grid = (0..n).map(|i| i as f64 / n as f64).collect();
    let (factor, realized_variance, diagnostics) = if mu == 0.0 {
        (
            Factor::Zero,
            vec![0.0; n],
            FactorDiagnostics {
                method: "zero",
                jitter: 0.0,
                clipped_mass: 0.0,
                min_eigenvalue: Some(0.0),
                trace: 0.0,
            },
        )
    } else if kernel.is_periodic() {
        let row: Vec<f64> = cov.row(0).iter().copied().collect();
        let (roots, diag) = circulant_factor(&row)?;
        let var = roots.iter().map(|r| r * r).sum::<f64>();
        (Factor::Circulant(roots), vec![var; n], diag)
    } else {
        let (l, diag) = dense_factor(&cov)?;
        let var = (0..n).map(|i| l.row(i).iter().map(|v| v * v).sum()).collect();
        (Factor::Dense(l), var, diag)
    };
    Ok(CovarianceGrid {
        grid,
        epsilon,
        mu,
        kernel: kernel.clone(),
        cov,
        mean,
        factor,
        realized_variance,
        diagnostics,
    })
}

impl CovarianceGrid {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Covariance actually reproduced by the factor (differs from `cov` by jitter or clipping).
    pub fn realized_covariance(&self) -> DMatrix<f64> {
        let n = self.len();
        match &self.factor {
            Factor::Zero => DMatrix::zeros(n, n),
            Factor::Dense(l) => l * l.transpose(),
            Factor::Circulant(roots) => {
                let mut buf: Vec<Complex64> = roots.iter().map(|r| Complex64::new(r * r, 0.0)).collect();
                FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
                DMatrix::from_fn(n, n, |i, j| buf[(j + n - i) % n].re)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_diagonal_and_continuity() {
        let eps = 0.01;
        let k = KernelSpec::Interval;
        assert!((regularized_log_cov(&k, eps, 0.0) - (-eps.ln() + 1.0)).abs() < 1e-14);
        let below = -k.log_r(eps) + (1.0 - 1.0) * eps * k.dlog_r(eps);
        assert_eq!(below, regularized_log_cov(&k, eps, eps));
        let c = build_covariance(&k, 0.7, 4.0 / 64.0, 64).unwrap();
        assert!((c.cov[(3, 3)] - 0.7 * (-(4.0f64 / 64.0).ln() + 1.0)).abs() < 1e-14);
        assert_eq!(c.cov, c.cov.transpose());
        assert_eq!(c.diagnostics.method, "cholesky");
    }

    #[test]
    fn zero_mu() {
        let c = build_covariance(&KernelSpec::Circle, 0.0, 4.0 / 32.0, 32).unwrap();
        assert!(c.cov.iter().all(|v| *v == 0.0));
        assert!(c.mean.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn circulant_reproduces_covariance() {
        let c = build_covariance(&KernelSpec::Circle, 0.5, 4.0 / 256.0, 256).unwrap();
        assert_eq!(c.diagnostics.method, "circulant");
        let r = c.realized_covariance();
        let diff = (&r - &c.cov).abs().max();
        let clip = c.diagnostics.clipped_mass / 256.0;
        assert!(diff <= clip + 1e-12, "{diff} vs {clip}");
        let d = build_covariance(&KernelSpec::Interval, 0.5, 4.0 / 128.0, 128).unwrap();
        assert!((&d.realized_covariance() - &d.cov).abs().max() < 1e-10);
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(build_covariance(&KernelSpec::Interval, 0.5, 0.001, 64).is_err());
        assert!(build_covariance(&KernelSpec::Interval, 2.5, 0.1, 64).is_err());
    }
}
