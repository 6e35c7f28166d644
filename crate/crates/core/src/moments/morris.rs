use crate::error::{GmcError, Result};
use crate::specfun::ln_gamma_signed;

fn checked_ln_gamma(x: f64, factor: &'static str, index: usize) -> Result<(f64, f64)> {
    if x <= 0.0 && x == x.round() {
        return Err(GmcError::Pole {
            factor,
            index,
            argument: x,
        });
    }
    ln_gamma_signed(x)
}

/// Integer moments of the circle total mass with test function |1 - e^{2 pi i s}|^{2 lambda}:
///
/// prod_{j<n} Gamma(1+2l-j/t) Gamma(1-(j+1)/t) / (Gamma(1+l-j/t)^2 Gamma(1-1/t)).
pub fn morris_moment(n: usize, tau: f64, lambda: f64) -> Result<f64> {
    if !(tau > 1.0) {
        return Err(GmcError::Domain(format!("tau must exceed 1, got {tau}")));
    }
    if !(lambda >= 0.0) {
        return Err(GmcError::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if n as f64 >= tau {
        return Err(GmcError::Divergent {
            order: n as f64,
            limit: tau,
        });
    }
    let mut log = 0.0;
    let mut sign = 1.0;
    for j in 0..n {
        let jt = j as f64 / tau;
        let (a, sa) = checked_ln_gamma(1.0 + 2.0 * lambda - jt, "Gamma(1+2*lambda-j/tau)", j)?;
        let (b, sb) = checked_ln_gamma(1.0 - (j as f64 + 1.0) / tau, "Gamma(1-(j+1)/tau)", j)?;
        // squared, so its sign drops out
        let (c, _) = checked_ln_gamma(1.0 + lambda - jt, "Gamma(1+lambda-j/tau)", j)?;
        let (d, sd) = checked_ln_gamma(1.0 - 1.0 / tau, "Gamma(1-1/tau)", j)?;
        log += a + b - 2.0 * c - d;
        sign *= sa * sb * sd;
    }
    Ok(sign * log.exp())
}
