//! Truncated complex Taylor series with exact coefficient algebra.
//!
//! Every residue the moment engine needs is a derivative of a product of
//! explicitly known analytic functions at an insertion point, so instead of
//! numerical differentiation the engine composes [`TaylorSeries`] values
//! (add, multiply, reciprocal, integer powers) around that point and reads
//! the derivative off the coefficient.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// A truncated Taylor expansion `sum_j coeffs[j] (z - center)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    center: Complex64,
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    /// A constant series of the given truncation order (inclusive).
    pub fn constant(value: Complex64, center: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        coeffs[0] = value;
        Self { center, coeffs }
    }

    /// The identity `z` expanded around `center`.
    pub fn identity(center: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = Complex64::ONE;
        }
        Self { center, coeffs }
    }

    /// The shifted monomial `z - w` expanded around `center`.
    pub fn linear_shift(w: Complex64, center: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        coeffs[0] = center - w;
        if order >= 1 {
            coeffs[1] = Complex64::ONE;
        }
        Self { center, coeffs }
    }

    /// Builds a series from explicit coefficients.
    pub fn from_coeffs(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self { center, coeffs }
    }

    /// Expansion point.
    pub fn center(&self) -> Complex64 {
        self.center
    }

    /// Truncation order (largest stored power).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `(z - center)^j`.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(Complex64::ZERO)
    }

    /// Value at the expansion point.
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `order`-th derivative at the expansion point, `order! * coeffs[order]`.
    pub fn deriv_at(&self, order: usize) -> Result<Complex64> {
        if order >= self.coeffs.len() {
            return Err(Error::SeriesOrder {
                needed: order,
                have: self.coeffs.len(),
            });
        }
        let mut fact = 1.0f64;
        for j in 2..=order {
            fact *= j as f64;
        }
        Ok(self.coeffs[order] * fact)
    }

    /// Pointwise sum; both operands must share the expansion point.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.center, other.center);
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::ZERO; len];
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(j) + other.coeff(j);
        }
        Self {
            center: self.center,
            coeffs,
        }
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Multiplies every coefficient by a constant.
    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            center: self.center,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    /// Cauchy product truncated to the shorter operand's order.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.center, other.center);
        let order = self.order().min(other.order());
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        for i in 0..=order {
            for j in 0..=(order - i) {
                coeffs[i + j] += self.coeff(i) * other.coeff(j);
            }
        }
        Self {
            center: self.center,
            coeffs,
        }
    }

    /// Multiplicative inverse; fails when the constant term vanishes.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() < 1e-300 {
            return Err(Error::SeriesDivision {
                magnitude: c0.norm(),
            });
        }
        let order = self.order();
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        coeffs[0] = Complex64::ONE / c0;
        for j in 1..=order {
            let mut acc = Complex64::ZERO;
            for i in 1..=j {
                acc += self.coeff(i) * coeffs[j - i];
            }
            coeffs[j] = -acc / c0;
        }
        Ok(Self {
            center: self.center,
            coeffs,
        })
    }

    /// Non-negative integer power by repeated squaring.
    pub fn powi(&self, exp: u32) -> Self {
        let mut result = Self::constant(Complex64::ONE, self.center, self.order());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// Binomial coefficient as a float, exact for the small arguments used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * f64::from(n - j) / f64::from(j + 1);
    }
    acc
}
