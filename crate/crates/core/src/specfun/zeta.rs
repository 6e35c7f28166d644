use super::gamma::digamma;
use crate::error::{domain, Result};

const DIRECT_TERMS: usize = 50;

// B_{2j} / (2j)!, j = 1..8
const EM_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta function zeta(s, a) = sum_{k>=0} (k+a)^{-s} for real s > 1, a > 0.
pub fn hurwitz_zeta_real(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) {
        return domain(format!("hurwitz zeta needs s > 1, got {s}"));
    }
    if !(a > 0.0) {
        return domain(format!("hurwitz zeta needs a > 0, got {a}"));
    }
    let n = DIRECT_TERMS as f64;
    // sum small terms first
    let mut direct = 0.0;
    for k in (0..DIRECT_TERMS).rev() {
        direct += (k as f64 + a).powf(-s);
    }
    let x = n + a;
    let xs = x.powf(-s);
    let mut tail = x * xs / (s - 1.0) + 0.5 * xs;
    // rising product s (s+1) ... (s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut xp = xs / x;
    for (j, c) in EM_COEFFS.iter().enumerate() {
        if j > 0 {
            let m = (2 * j) as f64;
            rising *= (s + m - 1.0) * (s + m);
            xp /= x * x;
        }
        tail += c * rising * xp;
    }
    Ok(direct + tail)
}

/// zeta(p, a) for integer p >= 1, with the convention zeta(1, a) := -psi(a).
pub fn hurwitz_zeta(p: u32, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return domain(format!("hurwitz zeta needs a > 0, got {a}"));
    }
    match p {
        0 => domain("hurwitz zeta order must be >= 1"),
        1 => Ok(-digamma(a)?),
        _ => hurwitz_zeta_real(p as f64, a),
    }
}

/// Riemann zeta at integer p >= 2, and the Euler constant at p = 1.
pub fn riemann_zeta(p: u32) -> Result<f64> {
    hurwitz_zeta(p, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn riemann_values() {
        assert!(rel(riemann_zeta(2).unwrap(), PI * PI / 6.0) < 1e-14);
        assert!(rel(riemann_zeta(4).unwrap(), PI.powi(4) / 90.0) < 1e-14);
        assert!(rel(riemann_zeta(3).unwrap(), 1.202_056_903_159_594_2) < 1e-14);
        assert!(rel(riemann_zeta(1).unwrap(), 0.577_215_664_901_532_9) < 1e-14);
        assert!(rel(riemann_zeta(30).unwrap(), 1.000_000_000_931_327_2) < 1e-15);
    }

    #[test]
    fn hurwitz_values() {
        // zeta(2, 1/2) = pi^2/2, zeta(2, 2) = pi^2/6 - 1
        assert!(rel(hurwitz_zeta(2, 0.5).unwrap(), PI * PI / 2.0) < 1e-13);
        assert!(rel(hurwitz_zeta(2, 2.0).unwrap(), PI * PI / 6.0 - 1.0) < 1e-13);
        // small a is dominated by a^{-p}
        let a = 1e-3;
        assert!(rel(hurwitz_zeta(3, a).unwrap(), a.powi(-3) + hurwitz_zeta(3, 1.0 + a).unwrap()) < 1e-15);
        assert!(hurwitz_zeta(2, 0.0).is_err());
        assert!(hurwitz_zeta(2, -1.0).is_err());
    }

    #[test]
    fn shift_identity() {
        for p in 2..12u32 {
            for a in [0.1, 0.75, 1.3, 7.0] {
                let lhs = hurwitz_zeta(p, a).unwrap() - hurwitz_zeta(p, a + 1.0).unwrap();
                assert!(rel(lhs, a.powi(-(p as i32))) < 1e-12, "p={p} a={a}");
            }
        }
    }
}
