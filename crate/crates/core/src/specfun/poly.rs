use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Commutative ring with unit, enough structure for the recurrences in this crate.
pub trait Ring:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
}

impl Ring for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Ring for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

impl Ring for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators without overflow
    r.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial with exact rational coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolynomialQ {
    coeffs: Vec<Rational>,
}

impl PolynomialQ {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolynomialQ { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_real(&self) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(rat_to_f64).collect())
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_real().eval(x)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.to_real().eval_complex(z)
    }

    /// p(x + s) for rational shift s.
    pub fn shift(&self, s: &Rational) -> Self {
        // Horner in the polynomial ring: p(x+s) = (...(c_n (x+s) + c_{n-1})(x+s) ...)
        let xs = PolynomialQ::new(vec![s.clone(), Rational::one()]);
        let mut acc = PolynomialQ::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * xs.clone() + PolynomialQ::constant(c.clone());
        }
        acc
    }

    /// p(a x) for rational a.
    pub fn dilate(&self, a: &Rational) -> Self {
        let mut pw = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pw);
            pw *= a;
        }
        Self::new(out)
    }

    /// Substitute another polynomial: p(q(x)).
    pub fn compose(&self, q: &PolynomialQ) -> Self {
        let mut acc = PolynomialQ::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q.clone() + PolynomialQ::constant(c.clone());
        }
        acc
    }
}

impl fmt::Display for PolynomialQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Zero for PolynomialQ {
    fn zero() -> Self {
        PolynomialQ { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for PolynomialQ {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Add for PolynomialQ {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let out = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Self::new(out)
    }
}

impl Sub for PolynomialQ {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PolynomialQ {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for PolynomialQ {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

impl Ring for PolynomialQ {
    fn from_i64(v: i64) -> Self {
        Self::constant(Rational::from_i64(v))
    }
}

/// Polynomial with floating coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RealPoly {
    pub coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        RealPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn add_scaled(&mut self, other: &RealPoly, w: f64) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += w * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let p = PolynomialQ::new(vec![rat(1, 2), rat(-3, 1), rat(2, 1)]);
        let q = PolynomialQ::x() + PolynomialQ::one();
        let r = p.clone() * q.clone();
        assert_eq!(r.eval(&rat(3, 1)), p.eval(&rat(3, 1)) * q.eval(&rat(3, 1)));
        assert_eq!((r.clone() - r).degree(), None);
    }

    #[test]
    fn shift_matches_compose() {
        let p = PolynomialQ::new(vec![rat(1, 3), rat(0, 1), rat(5, 7), rat(-1, 1)]);
        let s = rat(2, 5);
        let xs = PolynomialQ::new(vec![s.clone(), Rational::one()]);
        assert_eq!(p.shift(&s), p.compose(&xs));
        assert_eq!(p.shift(&s).eval(&rat(1, 1)), p.eval(&(rat(1, 1) + s)));
    }

    #[test]
    fn display() {
        let p = PolynomialQ::new(vec![rat(-1, 2), rat(0, 1), rat(3, 1)]);
        assert_eq!(p.to_string(), "3*x^2 + -1/2");
    }
}
