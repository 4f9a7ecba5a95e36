//! First generalized charged moment of excited states.
//!
//! [`f1_chiral`] evaluates one chirality as an exact polynomial in the flux
//! times a linear phase; [`f1_full`] combines both chiralities of a pair of
//! excited states, returning a flagged zero when the primary labels differ
//! (the moment vanishes by charge superselection). [`f1_excited_diagonal`]
//! recomputes diagonal moments through an independent closed-form product
//! over mode multiplicities, used as a cross-check of the positional engine.

use crate::error::Result;
use crate::series::binomial;
use crate::types::{normalization_factor, BosonState, ChiralModeList, ModelParams, ModulatedPolynomial};
use crate::wick::{positional_sum, Kernel, Mode};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Inputs of a full first-moment evaluation.
#[derive(Debug, Clone)]
pub struct N1Request<'a> {
    /// Model parameters.
    pub params: ModelParams,
    /// Interval fraction `r`.
    pub ratio: f64,
    /// Ket state.
    pub psi_in: &'a BosonState,
    /// Bra state.
    pub psi_out: &'a BosonState,
    /// Interval endpoint in units of the system size; `None` selects the
    /// zero-momentum convention in which the endpoint phase is dropped.
    pub v_over_l: Option<f64>,
}

/// One chirality of the first moment for oscillator content `modes_in` and
/// `modes_out` over a primary of vertex charge `alpha`.
///
/// The result is `exp(i beta r alpha theta)` times a polynomial of degree
/// at most the total number of modes. The charge-sourced parts of the
/// vertex weights cancel identically for this geometry and are skipped;
/// `alpha` enters only through the phase rate.
pub fn f1_chiral(
    params: &ModelParams,
    ratio: f64,
    modes_in: &ChiralModeList,
    modes_out: &ChiralModeList,
    alpha: f64,
) -> Result<ModulatedPolynomial> {
    let kernel = Kernel::single(ratio)?;
    let mut modes: Vec<Mode> = Vec::with_capacity(modes_in.len() + modes_out.len());
    modes.extend(modes_in.modes().iter().map(|&k| (0usize, k)));
    modes.extend(modes_out.modes().iter().map(|&k| (1usize, k)));

    let coeffs = positional_sum(&kernel, params, &modes, &[alpha, alpha], false)?;
    let norm = normalization_factor(modes_in) * normalization_factor(modes_out);
    let rate = params.beta() * ratio * alpha;
    Ok(ModulatedPolynomial::new(
        rate,
        coeffs.into_iter().map(|c| c * norm).collect(),
    ))
}

/// Full first moment of a pair of excited states.
///
/// Returns the flagged zero moment when the primary labels of the two
/// states differ, since the off-diagonal moment then vanishes exactly.
pub fn f1_full(req: &N1Request<'_>) -> Result<ModulatedPolynomial> {
    if req.psi_in.n != req.psi_out.n || req.psi_in.m != req.psi_out.m {
        return Ok(ModulatedPolynomial::zero());
    }
    let alpha = req.psi_in.alpha(&req.params);
    let alphabar = req.psi_in.alphabar(&req.params);

    let left = f1_chiral(&req.params, req.ratio, &req.psi_in.left, &req.psi_out.left, alpha)?;
    let right = f1_chiral(
        &req.params,
        req.ratio,
        &req.psi_in.right,
        &req.psi_out.right,
        alphabar,
    )?
    .conj();
    let mut full = left.mul(&right);

    if let Some(v_over_l) = req.v_over_l {
        // Endpoint phase of the insertion momenta; the anti-chiral factor
        // contributes with the opposite sign.
        let level_balance = (req.psi_in.left.level() as f64 - req.psi_out.left.level() as f64)
            - (req.psi_in.right.level() as f64 - req.psi_out.right.level() as f64);
        full = full.scale(Complex64::from_polar(1.0, 2.0 * PI * v_over_l * level_balance));
    }
    Ok(full)
}

/// Independent closed form for diagonal moments: a product over distinct
/// mode indices of generalized Laguerre-type polynomials in
/// `beta^2 theta^2 sin^2(k pi r)/(k pi^2)`, times the winding phase.
pub fn f1_excited_diagonal(
    params: &ModelParams,
    ratio: f64,
    state: &BosonState,
) -> Result<ModulatedPolynomial> {
    let beta = params.beta();
    let mut result = ModulatedPolynomial::constant(ratio * state.m as f64, Complex64::ONE);
    for modes in [&state.left, &state.right] {
        for (k, n) in modes.multiplicities() {
            let s = (f64::from(k) * PI * ratio).sin();
            let x_rate = beta * beta * s * s / (f64::from(k) * PI * PI);
            // L_n(x) = sum_s binom(n, s) (-x)^s / s! as a theta-polynomial.
            let mut coeffs = vec![Complex64::ZERO; 2 * n as usize + 1];
            let mut fact = 1.0;
            for j in 0..=n {
                if j > 0 {
                    fact *= f64::from(j);
                }
                let c = binomial(n, j) * (-x_rate).powi(j as i32) / fact;
                coeffs[2 * j as usize] = Complex64::new(c, 0.0);
            }
            result = result.mul(&ModulatedPolynomial::new(0.0, coeffs));
        }
    }
    Ok(result)
}

/// Flux polynomial of the excess first moment of the equal-weight level-two
/// superposition over the ground state; evaluates to zero at `theta = 0`.
pub fn delta_z1_polynomial(params: &ModelParams, ratio: f64) -> Result<ModulatedPolynomial> {
    let one_one = ChiralModeList::new(vec![1, 1])?;
    let two = ChiralModeList::new(vec![2])?;
    let f_11 = f1_chiral(params, ratio, &one_one, &one_one, 0.0)?;
    let f_22 = f1_chiral(params, ratio, &two, &two, 0.0)?;
    let f_12 = f1_chiral(params, ratio, &one_one, &two, 0.0)?;
    let combo = weighted_sum(&[(0.5, &f_11), (0.5, &f_22), (1.0, &f_12)]);
    let mut coeffs = combo.coeffs;
    // The combination is normalized to one at zero flux; dropping the
    // constant term keeps the excess exactly zero there.
    coeffs[0] = Complex64::ZERO;
    Ok(ModulatedPolynomial::new(0.0, coeffs))
}

/// Excess first moment of the equal-weight level-two superposition over the
/// ground state, `Delta Z_1(theta)`; zero at `theta = 0` by construction.
pub fn delta_z1(params: &ModelParams, ratio: f64, theta: f64) -> Result<Complex64> {
    Ok(delta_z1_polynomial(params, ratio)?.eval(theta))
}

/// Coefficient-wise weighted sum of unmodulated flux polynomials.
pub(crate) fn weighted_sum(terms: &[(f64, &ModulatedPolynomial)]) -> ModulatedPolynomial {
    debug_assert!(terms.iter().all(|(_, p)| p.phase_rate == 0.0));
    let len = terms.iter().map(|(_, p)| p.coeffs.len()).max().unwrap_or(0);
    let mut coeffs = vec![Complex64::ZERO; len.max(1)];
    for (w, p) in terms {
        for (j, &c) in p.coeffs.iter().enumerate() {
            coeffs[j] += c * *w;
        }
    }
    ModulatedPolynomial::new(0.0, coeffs)
}
