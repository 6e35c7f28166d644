use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::moments::KernelSpec;
use crate::quad::de_integrate;

/// Points of the positivity scan.
pub const POSITIVITY_GRID: usize = 10_000;

/// Intensity f(l) of the cone construction: rho(dt dl) = f(l)/l^2 dt dl.
///
/// f(l) = -l^2 (log r)''(l) below the cap b and (log r)'(b) above it. The cap
/// is 1 for interval kernels; periodic kernels use b = 1/2, where (log r)' = 0,
/// and carry the constant offset -log r(1/2).
#[derive(Clone, Debug)]
pub struct ConicalIntensity {
    pub kernel: KernelSpec,
    pub cap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub points: usize,
    pub min_value: f64,
    pub min_at: f64,
    /// First grid point where f is not strictly positive and finite.
    pub violation: Option<f64>,
}

impl PositivityReport {
    pub fn positive(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn conical_intensity(kernel: &KernelSpec) -> ConicalIntensity {
    ConicalIntensity {
        kernel: kernel.clone(),
        cap: if kernel.is_periodic() { 0.5 } else { 1.0 },
    }
}

impl ConicalIntensity {
    pub fn f(&self, l: f64) -> f64 {
        if l >= self.cap {
            return self.kernel.dlog_r(self.cap).max(0.0);
        }
        match self.kernel {
            KernelSpec::Interval => 1.0,
            KernelSpec::Circle => {
                let x = PI * l / (PI * l).sin();
                x * x
            }
            _ => -l * l * self.kernel.d2log_r(l),
        }
    }

    /// f(l) / l^2 = -(log r)''(l) below the cap.
    pub fn density(&self, l: f64) -> f64 {
        if l >= self.cap {
            self.f(l) / (l * l)
        } else {
            -self.kernel.d2log_r(l)
        }
    }

    /// Scan f on a log-spaced grid of (0, cap) plus the constant tail value.
    pub fn positivity(&self) -> PositivityReport {
        let (lo, hi) = (1e-6f64.ln(), (self.cap * (1.0 - 1e-6)).ln());
        let mut rep = PositivityReport {
            points: POSITIVITY_GRID,
            min_value: f64::INFINITY,
            min_at: 0.0,
            violation: None,
        };
        for i in 0..POSITIVITY_GRID {
            let l = (lo + (hi - lo) * i as f64 / (POSITIVITY_GRID - 1) as f64).exp();
            let v = self.f(l);
            if v < rep.min_value {
                rep.min_value = v;
                rep.min_at = l;
            }
            if rep.violation.is_none() && !(v > 0.0 && v.is_finite()) {
                rep.violation = Some(l);
            }
        }
        let tail = self.kernel.dlog_r(self.cap);
        if !(tail >= -1e-12) && rep.violation.is_none() {
            rep.violation = Some(self.cap);
        }
        rep
    }
}

/// rho(A_eps(u) intersect A_eps(v)) for |u - v| = z.
///
/// (b - z)(log r)'(b) + int_{max(z,eps)}^b f(l)/l^2 (l - z) dl - log r(b), with cap b.
pub fn rho_intersection(kernel: &KernelSpec, epsilon: f64, z: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(z >= 0.0) {
        return domain(format!("z must be >= 0, got {z}"));
    }
    let ci = conical_intensity(kernel);
    let b = ci.cap;
    let z = if kernel.is_periodic() {
        let m = z.rem_euclid(1.0);
        m.min(1.0 - m)
    } else if z >= 1.0 {
        return Ok(0.0);
    } else {
        z
    };
    let lo = z.max(epsilon);
    let tail = (b - z) * kernel.dlog_r(b) - kernel.log_r(b);
    if lo >= b {
        return Ok(tail);
    }
    let (v, err) = de_integrate(|l, _, _| ci.density(l) * (l - z), lo, b, 1e-13);
    if !(err <= 1e-9 * v.abs().max(1.0)) {
        return domain(format!("rho quadrature reached only {err:.3e}"));
    }
    Ok(tail + v)
}
