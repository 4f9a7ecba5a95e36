//! Core value types: model parameters, interval geometry, chiral mode
//! content, excited-state labels, and the `phase × polynomial` container
//! every moment evaluator returns.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Compactified-boson model parameters.
///
/// `beta` is the square root of the Luttinger parameter appearing in the
/// vertex-charge dictionary `alpha = n*beta + m/(2*beta)`; the free-fermion
/// point of the XX chain corresponds to `beta = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    beta: f64,
}

impl ModelParams {
    /// Creates parameters, requiring a positive compactification radius.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                requirement: "must be finite and positive",
            });
        }
        Ok(Self { beta })
    }

    /// The compactification parameter.
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for ModelParams {
    /// Free-fermion point `beta = 1`.
    fn default() -> Self {
        Self { beta: 1.0 }
    }
}

/// Interval geometry on a periodic system of length `total_length`, with the
/// subsystem occupying a fraction `ratio` of it and `cutoff` the short
/// distance scale entering logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    total_length: f64,
    ratio: f64,
    cutoff: f64,
}

impl Geometry {
    /// Creates a geometry; requires `total_length > 0`, `0 < ratio < 1`,
    /// and `cutoff > 0`.
    pub fn new(total_length: f64, ratio: f64, cutoff: f64) -> Result<Self> {
        if !(total_length.is_finite() && total_length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "total_length",
                value: total_length,
                requirement: "must be finite and positive",
            });
        }
        if !(ratio.is_finite() && ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                value: ratio,
                requirement: "must lie strictly between 0 and 1",
            });
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                value: cutoff,
                requirement: "must be finite and positive",
            });
        }
        Ok(Self {
            total_length,
            ratio,
            cutoff,
        })
    }

    /// Geometry whose dimensionless chord length has the given logarithm,
    /// using a half-system interval as the reference shape.
    pub fn from_log_chord(log_chord: f64) -> Result<Self> {
        Self::new(std::f64::consts::PI, 0.5, (-log_chord).exp())
    }

    /// Total system length.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Subsystem fraction `r`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Short-distance cutoff.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Chord length `(L/pi) sin(pi r)` of the interval on the circle.
    pub fn chord_length(&self) -> f64 {
        self.total_length / std::f64::consts::PI * (std::f64::consts::PI * self.ratio).sin()
    }

    /// Logarithm of the chord length in cutoff units; the large parameter
    /// of every saddle-point expansion in the resolved layer.
    pub fn log_chord(&self) -> f64 {
        (self.chord_length() / self.cutoff).ln()
    }
}

/// A multiset of positive chiral oscillator mode indices, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ChiralModeList {
    modes: Vec<u32>,
}

impl ChiralModeList {
    /// Builds a mode list, rejecting the index zero.
    pub fn new(mut modes: Vec<u32>) -> Result<Self> {
        if modes.iter().any(|&k| k == 0) {
            return Err(Error::ZeroMode);
        }
        modes.sort_unstable();
        Ok(Self { modes })
    }

    /// The empty list (a primary or vacuum module state).
    pub fn empty() -> Self {
        Self { modes: Vec::new() }
    }

    /// Sorted modes.
    pub fn modes(&self) -> &[u32] {
        &self.modes
    }

    /// Number of oscillator insertions.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    /// Whether no oscillators are present.
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Total level (sum of mode indices).
    pub fn level(&self) -> u64 {
        self.modes.iter().map(|&k| u64::from(k)).sum()
    }

    /// Iterates over `(mode, multiplicity)` pairs in increasing mode order.
    pub fn multiplicities(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        MultiplicityIter {
            modes: &self.modes,
            pos: 0,
        }
    }

    /// Whether the two lists are equal as multisets.
    pub fn same_content(&self, other: &Self) -> bool {
        self.modes == other.modes
    }
}

struct MultiplicityIter<'a> {
    modes: &'a [u32],
    pos: usize,
}

impl Iterator for MultiplicityIter<'_> {
    type Item = (u32, u32);

    fn next(&mut self) -> Option<(u32, u32)> {
        if self.pos >= self.modes.len() {
            return None;
        }
        let k = self.modes[self.pos];
        let mut count = 0u32;
        while self.pos < self.modes.len() && self.modes[self.pos] == k {
            count += 1;
            self.pos += 1;
        }
        Some((k, count))
    }
}

/// Norm factor `prod_k 1 / sqrt(k^{n_k} n_k!)` turning repeated raising
/// operators into a unit-norm state.
///
/// For `{k}` this is `1/sqrt(k)`, for `{1,1}` it is `1/sqrt(2)`, and for
/// `{1,1,2,2,2}` it is `1/sqrt(2! * 2^3 * 3!) = 1/(4 sqrt(6))`.
pub fn normalization_factor(modes: &ChiralModeList) -> f64 {
    let mut norm_sq = 1.0f64;
    for (k, n) in modes.multiplicities() {
        norm_sq *= f64::from(k).powi(n as i32);
        for j in 1..=n {
            norm_sq *= f64::from(j);
        }
    }
    1.0 / norm_sq.sqrt()
}

/// An excited state of the compact boson: oscillator content for each
/// chirality on top of a primary labelled by integers `(n, m)`.
///
/// The chiral vertex charges are `alpha = n*beta + m/(2*beta)` and
/// `alphabar = n*beta - m/(2*beta)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BosonState {
    /// Left-moving (holomorphic) oscillator modes.
    pub left: ChiralModeList,
    /// Right-moving (anti-holomorphic) oscillator modes.
    pub right: ChiralModeList,
    /// Vertex integer multiplying `beta`.
    pub n: i64,
    /// Winding integer multiplying `1/(2 beta)`.
    pub m: i64,
}

impl BosonState {
    /// A pure oscillator state over the neutral primary.
    pub fn oscillator(left: ChiralModeList, right: ChiralModeList) -> Self {
        Self {
            left,
            right,
            n: 0,
            m: 0,
        }
    }

    /// The ground state.
    pub fn ground() -> Self {
        Self::oscillator(ChiralModeList::empty(), ChiralModeList::empty())
    }

    /// Holomorphic vertex charge `n*beta + m/(2*beta)`.
    pub fn alpha(&self, params: &ModelParams) -> f64 {
        self.n as f64 * params.beta() + self.m as f64 / (2.0 * params.beta())
    }

    /// Anti-holomorphic vertex charge `n*beta - m/(2*beta)`.
    pub fn alphabar(&self, params: &ModelParams) -> f64 {
        self.n as f64 * params.beta() - self.m as f64 / (2.0 * params.beta())
    }
}

/// A function of the flux of the form `exp(i*phase_rate*theta) * P(theta)`
/// with `P` a complex-coefficient polynomial; the closed form every charged
/// moment in this crate takes.
///
/// `coeffs[j]` multiplies `theta^j`. An empty coefficient vector is the
/// canonical identically-zero value (used when a selection rule kills a
/// moment), distinguishable through [`ModulatedPolynomial::is_zero`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedPolynomial {
    /// Coefficient of `theta` in the exponent's phase.
    pub phase_rate: f64,
    /// Polynomial coefficients, constant term first.
    pub coeffs: Vec<Complex64>,
}

impl ModulatedPolynomial {
    /// Builds from a phase rate and coefficients.
    pub fn new(phase_rate: f64, coeffs: Vec<Complex64>) -> Self {
        Self { phase_rate, coeffs }
    }

    /// The identically-zero moment (selection rule outcome).
    pub fn zero() -> Self {
        Self {
            phase_rate: 0.0,
            coeffs: Vec::new(),
        }
    }

    /// A pure phase `exp(i*rate*theta)` times a constant.
    pub fn constant(phase_rate: f64, value: Complex64) -> Self {
        Self {
            phase_rate,
            coeffs: vec![value],
        }
    }

    /// Whether this is the flagged identically-zero moment.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Polynomial degree, or `None` when identically zero.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of `theta^j` (zero beyond the stored degree).
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(Complex64::ZERO)
    }

    /// Evaluates at a real flux value.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut poly = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            poly = poly * theta + c;
        }
        poly * Complex64::from_polar(1.0, self.phase_rate * theta)
    }

    /// Product of two moments: phase rates add, polynomials convolve.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex64::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self {
            phase_rate: self.phase_rate + other.phase_rate,
            coeffs,
        }
    }

    /// Multiplies every coefficient by a constant.
    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            phase_rate: self.phase_rate,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    /// Complex conjugate as a function of real `theta`: negates the phase
    /// rate and conjugates every coefficient.
    pub fn conj(&self) -> Self {
        Self {
            phase_rate: -self.phase_rate,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Largest coefficient magnitude (zero for the zero moment).
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
