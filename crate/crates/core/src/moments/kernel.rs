use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{GmcError, Result};
use crate::specfun::ln_gamma;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User supplied log-correlation profile `log r` with its derivative.
#[derive(Clone)]
pub struct CustomKernel {
    name: String,
    periodic: bool,
    log_r: RealFn,
    dlog_r: RealFn,
}

impl CustomKernel {
    /// Build and validate a custom kernel.
    ///
    /// Requires `t (log r)'(t) -> 1` at small `t` (checked at `t = 1e-4` to within 1e-3),
    /// `r(1) = 1` for interval kernels and `r(t) = r(1-t)` for periodic ones.
    pub fn new<F, G>(name: &str, periodic: bool, log_r: F, dlog_r: G) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let t = 1e-4;
        let slope = t * dlog_r(t);
        if !((slope - 1.0).abs() <= 1e-3) {
            return Err(GmcError::InvalidKernel(format!(
                "{name}: t (log r)'(t) at t = 1e-4 is {slope}, expected 1"
            )));
        }
        for k in 1..20 {
            let x = k as f64 / 20.0;
            let v = log_r(x);
            if !v.is_finite() {
                return Err(GmcError::InvalidKernel(format!("{name}: log r({x}) is not finite")));
            }
            if periodic && (v - log_r(1.0 - x)).abs() > 1e-9 * (1.0 + v.abs()) {
                return Err(GmcError::InvalidKernel(format!("{name}: r(t) != r(1-t) at t = {x}")));
            }
        }
        if !periodic && log_r(1.0).abs() > 1e-9 {
            return Err(GmcError::InvalidKernel(format!("{name}: r(1) must equal 1")));
        }
        Ok(CustomKernel {
            name: name.to_string(),
            periodic,
            log_r: Arc::new(log_r),
            dlog_r: Arc::new(dlog_r),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .field("periodic", &self.periodic)
            .finish()
    }
}

/// The log-correlation profile `r` of the field, `E[w(x) w(y)] = -mu log r(|x-y|)`.
#[derive(Clone, Debug)]
pub enum KernelSpec {
    /// r(t) = t on [0, 1].
    Interval,
    /// r(t) = |1 - exp(2 pi i t)| on the unit circle.
    Circle,
    /// Circle kernel divided by |1 - q exp(2 pi i t)|, 0 <= q < 1.
    GffCircle { q: f64 },
    Custom(CustomKernel),
}

impl KernelSpec {
    pub fn gff_circle(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(GmcError::InvalidKernel(format!("gff circle needs 0 <= q < 1, got {q}")));
        }
        Ok(KernelSpec::GffCircle { q })
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::Interval => "interval".into(),
            KernelSpec::Circle => "circle".into(),
            KernelSpec::GffCircle { q } => format!("gff_circle(q={q})"),
            KernelSpec::Custom(c) => c.name.clone(),
        }
    }

    /// Periodic kernels live on the circle and satisfy r(t) = r(1-t).
    pub fn is_periodic(&self) -> bool {
        match self {
            KernelSpec::Interval => false,
            KernelSpec::Circle | KernelSpec::GffCircle { .. } => true,
            KernelSpec::Custom(c) => c.periodic,
        }
    }

    /// log r(d) given both d and 1 - d, each computed without cancellation.
    pub fn log_r_pair(&self, d: f64, dc: f64) -> f64 {
        match self {
            KernelSpec::Interval => d.ln(),
            KernelSpec::Circle => (2.0 * (PI * d.min(dc)).sin()).ln(),
            KernelSpec::GffCircle { q } => {
                let t = d.min(dc);
                let th = 2.0 * PI * t;
                (2.0 * (PI * t).sin()).ln() - 0.5 * (1.0 - 2.0 * q * th.cos() + q * q).ln()
            }
            KernelSpec::Custom(c) => {
                if c.periodic {
                    (c.log_r)(d.min(dc))
                } else {
                    (c.log_r)(d)
                }
            }
        }
    }

    pub fn log_r(&self, d: f64) -> f64 {
        self.log_r_pair(d, 1.0 - d)
    }

    /// (log r)'(t).
    pub fn dlog_r(&self, t: f64) -> f64 {
        match self {
            KernelSpec::Interval => 1.0 / t,
            KernelSpec::Circle => PI / (PI * t).tan(),
            KernelSpec::GffCircle { q } => {
                let th = 2.0 * PI * t;
                let den = 1.0 - 2.0 * q * th.cos() + q * q;
                PI / (PI * t).tan() - 2.0 * PI * q * th.sin() / den
            }
            KernelSpec::Custom(c) => (c.dlog_r)(t),
        }
    }

    /// (log r)''(t); custom kernels use a central difference of the derivative.
    pub fn d2log_r(&self, t: f64) -> f64 {
        match self {
            KernelSpec::Interval => -1.0 / (t * t),
            KernelSpec::Circle => {
                let s = (PI * t).sin();
                -PI * PI / (s * s)
            }
            KernelSpec::GffCircle { q } => {
                let s = (PI * t).sin();
                let th = 2.0 * PI * t;
                let den = 1.0 - 2.0 * q * th.cos() + q * q;
                let inner = (q * th.cos() * den - 2.0 * q * q * th.sin() * th.sin()) / (den * den);
                -PI * PI / (s * s) - 4.0 * PI * PI * inner
            }
            KernelSpec::Custom(c) => {
                let h = 1e-5 * t.max(1e-3);
                ((c.dlog_r)(t + h) - (c.dlog_r)(t - h)) / (2.0 * h)
            }
        }
    }
}

/// Test function multiplying the chaos measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunctionSpec {
    Constant,
    /// |1 - exp(2 pi i s)|^{2 lambda}.
    Circular { lambda: f64 },
    /// s^{lambda1} (1-s)^{lambda2}.
    Beta { lambda1: f64, lambda2: f64 },
}

impl TestFunctionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = match *self {
            TestFunctionSpec::Constant => false,
            TestFunctionSpec::Circular { lambda } => !(lambda >= 0.0),
            TestFunctionSpec::Beta { lambda1, lambda2 } => !(lambda1 >= 0.0 && lambda2 >= 0.0),
        };
        if bad {
            return Err(GmcError::Domain(format!("test function exponents must be >= 0: {self:?}")));
        }
        Ok(())
    }

    /// phi(x) given x and 1 - x.
    pub fn value(&self, x: f64, xc: f64) -> f64 {
        match *self {
            TestFunctionSpec::Constant => 1.0,
            TestFunctionSpec::Circular { lambda } => {
                if lambda == 0.0 {
                    1.0
                } else {
                    (2.0 * (PI * x.min(xc)).sin()).powf(2.0 * lambda)
                }
            }
            TestFunctionSpec::Beta { lambda1, lambda2 } => x.powf(lambda1) * xc.powf(lambda2),
        }
    }

    /// The mean of phi over [0, 1].
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            TestFunctionSpec::Constant => 1.0,
            TestFunctionSpec::Circular { lambda } => {
                (ln_gamma(1.0 + 2.0 * lambda)? - 2.0 * ln_gamma(1.0 + lambda)?).exp()
            }
            TestFunctionSpec::Beta { lambda1, lambda2 } => {
                (ln_gamma(1.0 + lambda1)? + ln_gamma(1.0 + lambda2)? - ln_gamma(2.0 + lambda1 + lambda2)?).exp()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::de_integrate;

    #[test]
    fn derivatives_match_finite_differences() {
        let kernels = [KernelSpec::Interval, KernelSpec::Circle, KernelSpec::GffCircle { q: 0.4 }];
        for k in &kernels {
            for t in [0.05, 0.2, 0.37, 0.8] {
                let h = 1e-5;
                let d1 = (k.log_r(t + h) - k.log_r(t - h)) / (2.0 * h);
                let d2 = (k.dlog_r(t + h) - k.dlog_r(t - h)) / (2.0 * h);
                assert!((d1 - k.dlog_r(t)).abs() < 1e-6 * (1.0 + d1.abs()), "{k:?} t={t}");
                assert!((d2 - k.d2log_r(t)).abs() < 1e-5 * (1.0 + d2.abs()), "{k:?} t={t}");
            }
        }
    }

    #[test]
    fn short_distance_normalization() {
        for k in [KernelSpec::Interval, KernelSpec::Circle, KernelSpec::GffCircle { q: 0.9 }] {
            let t = 1e-6;
            assert!((t * k.dlog_r(t) - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn custom_validation() {
        let ok = CustomKernel::new("sin", false, |t: f64| (t * std::f64::consts::FRAC_PI_2).sin().ln(), |t: f64| {
            std::f64::consts::FRAC_PI_2 / (t * std::f64::consts::FRAC_PI_2).tan()
        });
        assert!(ok.is_ok());
        let bad = CustomKernel::new("twice", false, |t: f64| 2.0 * t.ln(), |t: f64| 2.0 / t);
        assert!(bad.is_err());
    }

    #[test]
    fn test_function_means() {
        for phi in [
            TestFunctionSpec::Constant,
            TestFunctionSpec::Circular { lambda: 0.25 },
            TestFunctionSpec::Circular { lambda: 1.5 },
            TestFunctionSpec::Beta { lambda1: 0.5, lambda2: 2.0 },
        ] {
            let (v, _) = de_integrate(|_, x, xc| phi.value(x, xc), 0.0, 1.0, 1e-14);
            assert!((v - phi.mean().unwrap()).abs() < 1e-12, "{phi:?}");
        }
        assert!(TestFunctionSpec::Circular { lambda: -0.1 }.mean().is_err());
    }
}
