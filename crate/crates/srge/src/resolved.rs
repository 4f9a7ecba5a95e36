//! Charge distributions and symmetry-resolved second Rényi entropies.
//!
//! The charged moments produced by the field-theory layer are polynomials
//! in the flux times the sharply peaked Gaussian ground-state moment, so
//! every flux integral reduces to Gaussian moments: [`modulated_gaussian_fourier`]
//! performs that reduction exactly, and the series functions
//! ([`prel_series`], [`s2_series`], [`delta_s2_excited`], [`s2_compact`])
//! implement the resulting saddle-point expansions in the inverse
//! log-cutoff of the interval.

use crate::error::{Error, Result};
use crate::types::{Geometry, ModelParams, ModulatedPolynomial};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Relative tolerance for parity and reality checks on moment coefficients.
const CONTENT_TOL: f64 = 1e-12;

/// Gaussian ground-state charged moment `exp(-beta^2 theta^2 L / (2 pi^2 n))`
/// with `L` the log-chord of the interval.
#[derive(Debug, Clone, Copy)]
pub struct GroundMoment {
    replicas: u32,
    log_chord: f64,
    beta: f64,
}

/// Ground-state charged moment of the `n`-th power of the reduced density
/// matrix, in the centered-charge convention.
pub fn ground_charged_moment(params: &ModelParams, geometry: &Geometry, replicas: u32) -> Result<GroundMoment> {
    let log_chord = geometry.log_chord();
    if !(log_chord > 0.0) {
        return Err(Error::InvalidParameter {
            name: "log_chord",
            value: log_chord,
            requirement: "must be positive; enlarge the interval or shrink the cutoff",
        });
    }
    if replicas == 0 {
        return Err(Error::InvalidParameter {
            name: "replicas",
            value: 0.0,
            requirement: "must be at least 1",
        });
    }
    Ok(GroundMoment {
        replicas,
        log_chord,
        beta: params.beta(),
    })
}

impl GroundMoment {
    /// Evaluates the moment at flux `theta`.
    pub fn eval(&self, theta: f64) -> f64 {
        (-self.beta * self.beta * theta * theta * self.log_chord
            / (2.0 * PI * PI * self.replicas as f64))
            .exp()
    }

    /// Variance of the flux Gaussian, `pi^2 n / (beta^2 L)`.
    pub fn flux_variance(&self) -> f64 {
        PI * PI * self.replicas as f64 / (self.beta * self.beta * self.log_chord)
    }
}

/// Even Taylor data of a normalised moment polynomial: `f(theta) =
/// f0 + f2 (beta theta)^2 + f4 (beta theta)^4 + ...`, plus its phase rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCoefficients {
    /// Constant term.
    pub f0: f64,
    /// Coefficient of `(beta theta)^2`.
    pub f2: f64,
    /// Coefficient of `(beta theta)^4`.
    pub f4: f64,
    /// Linear phase rate carried by the moment.
    pub phase_rate: f64,
}

impl MomentCoefficients {
    /// Extracts the coefficients, requiring a vanishing phase rate.
    pub fn from_polynomial(p: &ModulatedPolynomial, params: &ModelParams) -> Result<Self> {
        if p.phase_rate.abs() > CONTENT_TOL {
            return Err(Error::ResidualPhaseRate { rate: p.phase_rate });
        }
        Self::from_polynomial_shifted(p, params)
    }

    /// Extracts the coefficients of the polynomial part, keeping whatever
    /// phase rate the moment carries (it only shifts the charge variable).
    pub fn from_polynomial_shifted(p: &ModulatedPolynomial, params: &ModelParams) -> Result<Self> {
        let scale = p.max_coeff_norm().max(1e-300);
        for j in (1..p.coeffs.len()).step_by(2) {
            let mag = p.coeff(j).norm();
            if mag > CONTENT_TOL * scale {
                return Err(Error::ParityViolation {
                    index: j,
                    magnitude: mag,
                });
            }
        }
        for j in (0..p.coeffs.len()).step_by(2) {
            let imag = p.coeff(j).im.abs();
            if imag > CONTENT_TOL * scale {
                return Err(Error::ParityViolation {
                    index: j,
                    magnitude: imag,
                });
            }
        }
        let beta = params.beta();
        Ok(Self {
            f0: p.coeff(0).re,
            f2: p.coeff(2).re / beta.powi(2),
            f4: p.coeff(4).re / beta.powi(4),
            phase_rate: p.phase_rate,
        })
    }
}

fn positive_log_chord(geometry: &Geometry) -> Result<f64> {
    let log_chord = geometry.log_chord();
    if !(log_chord > 0.0) {
        return Err(Error::InvalidParameter {
            name: "log_chord",
            value: log_chord,
            requirement: "must be positive",
        });
    }
    Ok(log_chord)
}

/// Charge distribution of an excited state relative to the ground state,
/// to second order in the inverse log-chord:
/// `1 + h2 pi^2/L + (3 h4 - h2 q^2/beta^2) pi^4/L^2`.
pub fn prel_series(h2: f64, h4: f64, params: &ModelParams, geometry: &Geometry, q: f64) -> Result<f64> {
    let lg = positive_log_chord(geometry)?;
    let beta = params.beta();
    Ok(1.0 + h2 * PI * PI / lg + (3.0 * h4 - h2 * q * q / (beta * beta)) * PI.powi(4) / (lg * lg))
}

/// A charge distribution over an integer window of charge sectors.
#[derive(Debug, Clone)]
pub struct ChargeDistribution {
    /// Charge values (centered convention).
    pub charges: Vec<i64>,
    /// Probability weights.
    pub probabilities: Vec<f64>,
}

impl ChargeDistribution {
    /// Sum of the stored weights (close to one when the window is wide).
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Mean charge under the stored weights.
    pub fn mean(&self) -> f64 {
        let total = self.total();
        self.charges
            .iter()
            .zip(&self.probabilities)
            .map(|(&q, &p)| q as f64 * p)
            .sum::<f64>()
            / total
    }

    /// Charge variance under the stored weights.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let total = self.total();
        self.charges
            .iter()
            .zip(&self.probabilities)
            .map(|(&q, &p)| (q as f64 - mean).powi(2) * p)
            .sum::<f64>()
            / total
    }
}

/// Leading Gaussian charge distribution of an excited state whose first
/// moment has quadratic coefficient `h2`: width parameter
/// `b1 = L - 2 pi^2 h2`, weights `P(q) = pi/(beta sqrt(2 pi b1)) *
/// exp(-pi^2 q^2/(2 beta^2 b1))` over the requested window.
pub fn gaussian_charge_distribution(
    h2: f64,
    params: &ModelParams,
    geometry: &Geometry,
    q_window: std::ops::RangeInclusive<i64>,
) -> Result<ChargeDistribution> {
    let lg = positive_log_chord(geometry)?;
    let beta = params.beta();
    let b1 = lg - 2.0 * PI * PI * h2;
    if b1 <= 0.0 {
        return Err(Error::WidthCollapsed { b1 });
    }
    let prefactor = PI / (beta * (2.0 * PI * b1).sqrt());
    let charges: Vec<i64> = q_window.collect();
    let probabilities = charges
        .iter()
        .map(|&q| {
            let qf = q as f64;
            prefactor * (-PI * PI * qf * qf / (2.0 * beta * beta * b1)).exp()
        })
        .collect();
    Ok(ChargeDistribution {
        charges,
        probabilities,
    })
}

/// Exact Fourier transform `int dtheta/2pi exp(-i theta q) P(theta)
/// exp(-theta^2/(2 v))` of a modulated polynomial against a flux Gaussian
/// of variance `v`, by Gaussian-moment recursion.
///
/// Handles every polynomial power (odd ones included) and the moment's
/// linear phase, which shifts the charge argument.
pub fn modulated_gaussian_fourier(p: &ModulatedPolynomial, flux_variance: f64, q: f64) -> Complex64 {
    if p.is_zero() {
        return Complex64::ZERO;
    }
    let v = flux_variance;
    let u = q - p.phase_rate;
    let g0 = (v / (2.0 * PI)).sqrt() * (-v * u * u / 2.0).exp();

    // p_j polynomials of (d/du)^j exp(-v u^2/2) = p_j(u) exp(-v u^2/2).
    let mut pj: Vec<f64> = vec![1.0];
    let mut result = Complex64::ZERO;
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    for (j, &c) in p.coeffs.iter().enumerate() {
        if j > 0 {
            // p_{j} = p_{j-1}' - v u p_{j-1}
            let mut next = vec![0.0; pj.len() + 1];
            for (d, &coef) in pj.iter().enumerate() {
                if d > 0 {
                    next[d - 1] += coef * d as f64;
                }
                next[d + 1] -= v * coef;
            }
            pj = next;
        }
        if c == Complex64::ZERO {
            continue;
        }
        let mut val = 0.0;
        for &coef in pj.iter().rev() {
            val = val * u + coef;
        }
        result += c * i_pow[j % 4] * val;
    }
    result * g0
}

/// Distribution of subsystem charge for a state with first moment `p`
/// (polynomial times phase), from the exact Gaussian-moment Fourier
/// transform against the ground-state flux Gaussian.
pub fn charge_distribution_from_moment(
    p: &ModulatedPolynomial,
    params: &ModelParams,
    geometry: &Geometry,
    q_window: std::ops::RangeInclusive<i64>,
) -> Result<ChargeDistribution> {
    let ground = ground_charged_moment(params, geometry, 1)?;
    let v = ground.flux_variance();
    let charges: Vec<i64> = q_window.collect();
    let probabilities = charges
        .iter()
        .map(|&q| modulated_gaussian_fourier(p, v, q as f64).re)
        .collect();
    Ok(ChargeDistribution {
        charges,
        probabilities,
    })
}

/// Symmetry-resolved second Rényi entropy of an excited state, relative
/// form in powers of the inverse log-chord:
/// `-log f0 - (2 f2/f0) pi^2/L + (2 f2^2/f0^2 - 12 f4/f0 + 4 f2 q^2/(f0 beta^2)) pi^4/L^2`.
///
/// `f0, f2, f4` are the even coefficients of the second moment of the
/// state; the ground-state contribution is subtracted.
pub fn s2_series(
    f0: f64,
    f2: f64,
    f4: f64,
    params: &ModelParams,
    geometry: &Geometry,
    q: f64,
) -> Result<f64> {
    let lg = positive_log_chord(geometry)?;
    if f0 <= 0.0 {
        return Err(Error::NonPositiveLeading { f0 });
    }
    let beta = params.beta();
    Ok(-f0.ln() - (2.0 * f2 / f0) * PI * PI / lg
        + (2.0 * f2 * f2 / (f0 * f0) - 12.0 * f4 / f0 + 4.0 * f2 * q * q / (f0 * beta * beta))
            * PI.powi(4)
            / (lg * lg))
}

/// Difference of resolved second Rényi entropies between an excited state
/// and the ground state, combining its first-moment coefficients
/// `(h2, h4)` and second-moment coefficients `(f0, f2, f4)`:
/// `-log f0 + 2 (h2 - f2/f0) pi^2/L + 2 [f2^2/f0^2 - 6 f4/f0 - h2^2/2 + 3 h4
///  + (2 f2/f0 - h2) q^2/beta^2] pi^4/L^2`.
#[allow(clippy::too_many_arguments)]
pub fn delta_s2_excited(
    f0: f64,
    f2: f64,
    f4: f64,
    h2: f64,
    h4: f64,
    params: &ModelParams,
    geometry: &Geometry,
    q: f64,
) -> Result<f64> {
    let lg = positive_log_chord(geometry)?;
    if f0 <= 0.0 {
        return Err(Error::NonPositiveLeading { f0 });
    }
    let beta = params.beta();
    Ok(-f0.ln()
        + 2.0 * (h2 - f2 / f0) * PI * PI / lg
        + 2.0
            * (f2 * f2 / (f0 * f0) - 6.0 * f4 / f0 - h2 * h2 / 2.0
                + 3.0 * h4
                + (2.0 * f2 / f0 - h2) * q * q / (beta * beta))
            * PI.powi(4)
            / (lg * lg))
}

/// Closed compact form of the resolved second Rényi entropy of an excited
/// state, with effective cutoff shifts `delta = exp(-4 pi^2 (h2 - f2/f0))`
/// and `kappa = exp(-pi^2 (h2 + 2 f2/f0))` and a configurable degeneracy
/// factor `g_a` (one by default):
/// `L/4 - log(log(l' delta))/2 - log(2 beta f0 / sqrt(pi)) + 2 log g_a
///  - 2 pi^4 (2 f2/f0 - h2)^2 / L^2 + 2 pi^4 q^2 (h2 - 2 f2/f0) / (beta^2 log^2(l' kappa))`.
#[allow(clippy::too_many_arguments)]
pub fn s2_compact(
    f0: f64,
    f2: f64,
    h2: f64,
    g_a: f64,
    params: &ModelParams,
    geometry: &Geometry,
    q: f64,
) -> Result<f64> {
    let lg = positive_log_chord(geometry)?;
    if f0 <= 0.0 {
        return Err(Error::NonPositiveLeading { f0 });
    }
    if g_a <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "g_a",
            value: g_a,
            requirement: "must be positive",
        });
    }
    let beta = params.beta();
    let log_delta = -4.0 * PI * PI * (h2 - f2 / f0);
    let log_kappa = -PI * PI * (h2 + 2.0 * f2 / f0);
    let shifted = lg + log_delta;
    if shifted <= 0.0 {
        return Err(Error::WidthCollapsed { b1: shifted });
    }
    let kappa_log = lg + log_kappa;
    Ok(lg / 4.0 - 0.5 * shifted.ln() - (2.0 * beta * f0 / PI.sqrt()).ln() + 2.0 * g_a.ln()
        - 2.0 * PI.powi(4) * (2.0 * f2 / f0 - h2).powi(2) / (lg * lg)
        + 2.0 * PI.powi(4) * q * q * (h2 - 2.0 * f2 / f0) / (beta * beta * kappa_log * kappa_log))
}
