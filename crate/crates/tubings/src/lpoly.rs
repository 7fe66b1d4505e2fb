//! Polynomials in the log-momentum variable L.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{factorial, Rational, Scalar};

/// Coefficient vector indexed by the power of L, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct LPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> LPoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LPoly { coeffs }
    }

    pub fn constant(c: S) -> Self {
        LPoly::new(vec![c])
    }

    /// c * L^k
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        LPoly::new(v)
    }

    /// L^k / k!
    pub fn divided_power(k: usize) -> Self {
        LPoly::monomial(S::from_rational(Rational::new(1.into(), factorial(k))), k)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        LPoly::new(self.coeffs.iter().map(|c| c.scale(q)).collect())
    }

    pub fn mul_scalar(&self, s: &S) -> Self {
        LPoly::new(self.coeffs.iter().map(|c| c.clone() * s).collect())
    }

    /// Coefficients with respect to the basis L^k/k!.
    pub fn divided_coeffs(&self) -> Vec<S> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.scale(&Rational::from_integer(factorial(k))))
            .collect()
    }

    /// Evaluates at a scalar value of L.
    pub fn eval(&self, l: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * l;
            acc += c;
        }
        acc
    }
}

impl<S: Scalar> fmt::Display for LPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*L")?,
                _ => write!(f, "({c})*L^{k}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Zero for LPoly<S> {
    fn zero() -> Self {
        LPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Scalar> One for LPoly<S> {
    fn one() -> Self {
        LPoly::constant(S::one())
    }
}

impl<'a, S: Scalar> AddAssign<&'a LPoly<S>> for LPoly<S> {
    fn add_assign(&mut self, rhs: &'a LPoly<S>) {
        if rhs.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), S::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl<S: Scalar> Add for LPoly<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<S: Scalar> Neg for LPoly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        LPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<S: Scalar> Sub for LPoly<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<'a, S: Scalar> Mul<&'a LPoly<S>> for LPoly<S> {
    type Output = Self;
    fn mul(self, rhs: &'a LPoly<S>) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LPoly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b);
            }
        }
        LPoly::new(out)
    }
}

impl<S: Scalar> Mul for LPoly<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self * &rhs
    }
}

impl<S: Scalar> Scalar for LPoly<S> {
    fn from_rational(q: Rational) -> Self {
        LPoly::constant(S::from_rational(q))
    }
    fn scale(&self, q: &Rational) -> Self {
        LPoly::scale(self, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn trims_and_multiplies() {
        let p: LPoly<Rational> = LPoly::new(vec![int(1), int(2), int(0)]);
        assert_eq!(p.degree(), Some(1));
        let q = p.clone() * &p;
        assert_eq!(q.coeffs(), &[int(1), int(4), int(4)]);
        assert!((p.clone() - p).is_zero());
    }

    #[test]
    fn divided_powers() {
        let p: LPoly<Rational> = LPoly::divided_power(3);
        assert_eq!(p.coeff(3), rat(1, 6));
        assert_eq!(p.divided_coeffs(), vec![int(0), int(0), int(0), int(1)]);
        assert_eq!(p.eval(&int(2)), rat(4, 3));
    }
}
