//! Second generalized charged moment of excited states.
//!
//! The evaluation runs on the double cover of the single-interval geometry:
//! four insertion points carry the (possibly charged) excited states, and
//! each oscillator mode either pairs with another or couples to the flux
//! and charges through a vertex weight. [`k_prefactor`] supplies the
//! charge-dependent overall factor; [`f2_chiral`] evaluates one chirality,
//! [`f2_full`] both; [`f2_chiral_half`] is an independent half-interval
//! fast path built on tabulated central binomial weights. [`delta_z2`]
//! assembles the level-two excess used in the lattice comparisons.

use crate::error::{Error, Result};
use crate::moments1::weighted_sum;
use crate::series::binomial;
use crate::types::{normalization_factor, BosonState, ChiralModeList, ModelParams, ModulatedPolynomial};
use crate::wick::{pair_value, positional_sum, Kernel, Mode, VertexWeight, MODE_BUDGET};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Inputs of a full second-moment evaluation: four states, cyclically
/// ordered as ket/bra/ket/bra along the replica trace.
#[derive(Debug, Clone)]
pub struct N2Request<'a> {
    /// Model parameters.
    pub params: ModelParams,
    /// Interval fraction `r`.
    pub ratio: f64,
    /// The four states entering the two generalized density matrices.
    pub states: [&'a BosonState; 4],
    /// Interval endpoint in units of the system size; `None` selects the
    /// zero-momentum convention in which endpoint phases are dropped.
    pub v_over_l: Option<f64>,
}

/// Tolerance on the per-chirality charge balance `a1 + a3 = a2 + a4`.
const CHARGE_BALANCE_TOL: f64 = 1e-9;

/// Charge-dependent prefactor of the second moment for one chirality.
///
/// Returns `(scale, rate)` such that the prefactor is
/// `scale * exp(i * rate * theta)`. The scale multiplies, with
/// principal-branch logarithms throughout:
///
/// * pairwise difference factors `(y_m - y_n)^(a'_m a'_n)` over the four
///   insertion points, with orientation-signed charges `a' = (a1, -a2, a3, -a4)`;
/// * per-point conformal factors `(±i sin(pi r)/y_i)^(a_i^2 / 2)`;
/// * the endpoint momentum phase `exp(i pi (v/L)(a1^2 + a3^2 - a2^2 - a4^2))`.
///
/// The flux-vertex contractions with the four charges are a pure phase and
/// fix the rate `beta [ (r/4)(a1+a2+a3+a4) + (a3-a4)/2 ]`, which reduces to
/// `beta r (a1+a3)/2` whenever `a3 = a4`. Its modulus always equals
/// `cos^2(pi r/2)` to the power `(a2-a3)^2` times `sin^2(pi r/2)` to the
/// power `(a1-a2)^2`, which is asserted in tests.
pub fn k_prefactor(
    params: &ModelParams,
    ratio: f64,
    v_over_l: f64,
    alphas: [f64; 4],
) -> Result<(Complex64, f64)> {
    let kernel = Kernel::double(ratio)?;
    let [a1, a2, a3, a4] = alphas;
    if (a1 + a3 - a2 - a4).abs() > CHARGE_BALANCE_TOL {
        return Err(Error::ChargeBalance {
            detail: format!("a1 + a3 = {} differs from a2 + a4 = {}", a1 + a3, a2 + a4),
        });
    }

    let signed = [a1, -a2, a3, -a4];
    let mut scale = Complex64::ONE;
    for m in 0..4 {
        for n in 0..m {
            let exponent = signed[m] * signed[n];
            if exponent == 0.0 {
                continue;
            }
            let diff = kernel.insertion(m) - kernel.insertion(n);
            scale *= (diff.ln() * exponent).exp();
        }
    }
    let s = (PI * ratio).sin();
    for (i, &a) in alphas.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let orientation = Complex64::new(0.0, Kernel::sign(i));
        let conformal = orientation * s / kernel.insertion(i);
        scale *= (conformal.ln() * (a * a / 2.0)).exp();
    }
    scale *= Complex64::from_polar(
        1.0,
        PI * v_over_l * (a1 * a1 + a3 * a3 - a2 * a2 - a4 * a4),
    );

    let rate = params.beta() * (ratio / 4.0 * (a1 + a2 + a3 + a4) + (a3 - a4) / 2.0);
    Ok((scale, rate))
}

fn chiral_core(
    params: &ModelParams,
    kernel: &Kernel,
    modes: [&ChiralModeList; 4],
    alphas: [f64; 4],
    weights_override: Option<&dyn Fn(usize, u32) -> Result<VertexWeight>>,
) -> Result<ModulatedPolynomial> {
    let total: usize = modes.iter().map(|m| m.len()).sum();
    if total > MODE_BUDGET {
        return Err(Error::ModeBudget {
            count: total,
            max: MODE_BUDGET,
        });
    }
    let charged = alphas.iter().any(|&a| a != 0.0);

    let mut positions: Vec<Mode> = Vec::with_capacity(total);
    for (sheet, list) in modes.iter().enumerate() {
        positions.extend(list.modes().iter().map(|&k| (sheet, k)));
    }

    let coeffs = match weights_override {
        None => positional_sum(kernel, params, &positions, &alphas, charged)?,
        Some(weights) => {
            // Same split/match sum, with the tabulated weights in place of
            // the residue-computed ones.
            positional_sum_with(kernel, &positions, weights)?
        }
    };

    let (scale, rate) = k_prefactor(params, kernel.ratio(), 0.0, alphas)?;
    let norm: f64 = modes.iter().map(|m| normalization_factor(m)).product();
    Ok(ModulatedPolynomial::new(
        rate,
        coeffs.into_iter().map(|c| c * scale * norm).collect(),
    ))
}

/// Split/match sum with externally supplied vertex weights, used by the
/// half-interval fast path.
fn positional_sum_with(
    kernel: &Kernel,
    positions: &[Mode],
    weights: &dyn Fn(usize, u32) -> Result<VertexWeight>,
) -> Result<Vec<Complex64>> {
    let m = positions.len();
    let mut w = Vec::with_capacity(m);
    for &(sheet, k) in positions {
        w.push(weights(sheet, k)?);
    }
    let mut d = vec![vec![Complex64::ZERO; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let value = pair_value(kernel, positions[i].0, positions[j].0, positions[i].1, positions[j].1)?
                / (4.0 * PI * PI);
            d[i][j] = value;
            d[j][i] = value;
        }
    }
    let mut total = vec![Complex64::ZERO; m + 1];
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let paired: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let pair_sum = matching_sum(&paired, &d);
        if pair_sum == Complex64::ZERO {
            continue;
        }
        let mut poly = vec![Complex64::ONE];
        for (i, wi) in w.iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            let mut next = vec![Complex64::ZERO; poly.len() + 1];
            for (jj, &c) in poly.iter().enumerate() {
                next[jj] += c * wi.c0;
                next[jj + 1] += c * wi.c1;
            }
            poly = next;
        }
        for (jj, &c) in poly.iter().enumerate() {
            total[jj] += pair_sum * c;
        }
    }
    Ok(total)
}

fn matching_sum(items: &[usize], d: &[Vec<Complex64>]) -> Complex64 {
    if items.is_empty() {
        return Complex64::ONE;
    }
    let first = items[0];
    let mut acc = Complex64::ZERO;
    for pick in 1..items.len() {
        let value = d[first][items[pick]];
        if value == Complex64::ZERO {
            continue;
        }
        let rest: Vec<usize> = items[1..]
            .iter()
            .filter(|&&x| x != items[pick])
            .copied()
            .collect();
        acc += value * matching_sum(&rest, d);
    }
    acc
}

/// One chirality of the second moment: four mode lists on the four
/// insertion points of the double cover, with vertex charges `alphas`.
pub fn f2_chiral(
    params: &ModelParams,
    ratio: f64,
    modes: [&ChiralModeList; 4],
    alphas: [f64; 4],
) -> Result<ModulatedPolynomial> {
    let kernel = Kernel::double(ratio)?;
    chiral_core(params, &kernel, modes, alphas, None)
}

/// Half-interval (`r = 1/2`) fast path for one chirality of the second
/// moment, replacing the residue-computed vertex weights by closed forms.
///
/// The flux part of a weight is `beta theta` for odd mode index and zero
/// for even; the charge part is built from central binomial ratios
/// `c_s = binom(2s, s) / 2^(2s+1)`, whose first values are 1/2, 1/4, 3/16,
/// 5/32, 35/256. Pair values and prefactor are shared with the generic
/// path, so agreement with [`f2_chiral`] at `r = 1/2` is a genuine
/// cross-check of the weight tables.
pub fn f2_chiral_half(
    params: &ModelParams,
    modes: [&ChiralModeList; 4],
    alphas: [f64; 4],
) -> Result<ModulatedPolynomial> {
    let kernel = Kernel::double(0.5)?;
    let [a1, a2, a3, a4] = alphas;
    let beta = params.beta();
    let weights = move |sheet: usize, k: u32| -> Result<VertexWeight> {
        let sigma = Kernel::sign(sheet);
        let c1 = if k % 2 == 1 {
            Complex64::new(sigma * beta / (2.0 * PI), 0.0)
        } else {
            Complex64::ZERO
        };
        let s = k / 2;
        let c_s = binomial(2 * s, s) / 2f64.powi(2 * s as i32 + 1);
        // Charge part g2/(2 pi) on the first two insertion points; the
        // third and fourth are the negatives of the first and second.
        let (mirror, base_sheet) = if sheet < 2 { (1.0, sheet) } else { (-1.0, sheet - 2) };
        let g2_over_2pi = match (base_sheet, k % 2) {
            (0, 1) => Complex64::new(0.0, c_s * (a2 - a4)),
            (0, 0) => Complex64::new(c_s * (a1 - a3), 0.0),
            (1, 1) => Complex64::new(0.0, c_s * (a1 - a3)),
            (1, 0) => Complex64::new(-c_s * (a2 - a4), 0.0),
            _ => unreachable!(),
        };
        Ok(VertexWeight {
            c0: sigma * mirror * g2_over_2pi,
            c1,
        })
    };
    chiral_core(params, &kernel, modes, alphas, Some(&weights))
}

/// Full second moment of four excited states.
///
/// Each chirality must satisfy the charge balance `a1 + a3 = a2 + a4`;
/// otherwise the moment vanishes by superselection and the flagged zero is
/// returned. The anti-chiral factor is the conjugate evaluation on the
/// right-moving mode lists.
pub fn f2_full(req: &N2Request<'_>) -> Result<ModulatedPolynomial> {
    let alphas = [
        req.states[0].alpha(&req.params),
        req.states[1].alpha(&req.params),
        req.states[2].alpha(&req.params),
        req.states[3].alpha(&req.params),
    ];
    let alphabars = [
        req.states[0].alphabar(&req.params),
        req.states[1].alphabar(&req.params),
        req.states[2].alphabar(&req.params),
        req.states[3].alphabar(&req.params),
    ];
    let balanced = |a: &[f64; 4]| (a[0] + a[2] - a[1] - a[3]).abs() <= CHARGE_BALANCE_TOL;
    if !balanced(&alphas) || !balanced(&alphabars) {
        return Ok(ModulatedPolynomial::zero());
    }

    let left = f2_chiral(
        &req.params,
        req.ratio,
        [
            &req.states[0].left,
            &req.states[1].left,
            &req.states[2].left,
            &req.states[3].left,
        ],
        alphas,
    )?;
    let right = f2_chiral(
        &req.params,
        req.ratio,
        [
            &req.states[0].right,
            &req.states[1].right,
            &req.states[2].right,
            &req.states[3].right,
        ],
        alphabars,
    )?
    .conj();
    let mut full = left.mul(&right);

    if let Some(v_over_l) = req.v_over_l {
        let level = |m: &ChiralModeList| m.level() as f64;
        let left_balance = level(&req.states[0].left) - level(&req.states[1].left)
            + level(&req.states[2].left)
            - level(&req.states[3].left);
        let right_balance = level(&req.states[0].right) - level(&req.states[1].right)
            + level(&req.states[2].right)
            - level(&req.states[3].right);
        let momentum = (alphas[0] * alphas[0] + alphas[2] * alphas[2]
            - alphas[1] * alphas[1]
            - alphas[3] * alphas[3])
            - (alphabars[0] * alphabars[0] + alphabars[2] * alphabars[2]
                - alphabars[1] * alphabars[1]
                - alphabars[3] * alphabars[3]);
        full = full.scale(Complex64::from_polar(
            1.0,
            2.0 * PI * v_over_l * (left_balance - right_balance) + PI * v_over_l * momentum,
        ));
    }
    Ok(full)
}

/// Excess second moment of the equal-weight level-two superposition over
/// Flux polynomial of the excess second moment of the equal-weight
/// level-two superposition over the ground state; evaluates to zero at
/// `theta = 0`.
pub fn delta_z2_polynomial(params: &ModelParams, ratio: f64) -> Result<ModulatedPolynomial> {
    let eleven = ChiralModeList::new(vec![1, 1])?;
    let two = ChiralModeList::new(vec![2])?;
    let f = |a: &ChiralModeList, b: &ChiralModeList, c: &ChiralModeList, d: &ChiralModeList| {
        f2_chiral(params, ratio, [a, b, c, d], [0.0; 4])
    };
    let t1112 = f(&eleven, &eleven, &eleven, &two)?;
    let t1222 = f(&eleven, &two, &two, &two)?;
    let t1221 = f(&eleven, &two, &two, &eleven)?;
    let t1122 = f(&eleven, &eleven, &two, &two)?;
    let t1212 = f(&eleven, &two, &eleven, &two)?;
    let t1111 = f(&eleven, &eleven, &eleven, &eleven)?;
    let t2222 = f(&two, &two, &two, &two)?;
    let combo = weighted_sum(&[
        (1.0, &t1112),
        (1.0, &t1222),
        (0.5, &t1221),
        (0.5, &t1122),
        (0.5, &t1212),
        (0.25, &t1111),
        (0.25, &t2222),
    ]);
    let mut coeffs = combo.coeffs;
    // Subtract the zero-flux value so the excess vanishes there exactly.
    coeffs[0] = Complex64::ZERO;
    Ok(ModulatedPolynomial::new(0.0, coeffs))
}

/// Excess second moment of the equal-weight level-two superposition over
/// the ground state, `Delta Z_2(theta)`; zero at `theta = 0`.
pub fn delta_z2(params: &ModelParams, ratio: f64, theta: f64) -> Result<Complex64> {
    Ok(delta_z2_polynomial(params, ratio)?.eval(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: Complex64, b: Complex64, eps: f64) {
        assert_abs_diff_eq!(a.re, b.re, epsilon = eps);
        assert_abs_diff_eq!(a.im, b.im, epsilon = eps);
    }

    #[test]
    fn prefactor_modulus_matches_identity() {
        let params = ModelParams::new(1.2).unwrap();
        for (alphas, r) in [
            ([0.0, 0.0, 0.7, 0.7], 0.37),
            ([0.5, 0.5, 0.5, 0.5], 0.61),
            ([0.9, 0.4, -0.3, 0.2], 0.5),
            ([1.0, 0.25, -0.5, 0.25], 0.18),
        ] {
            let (scale, _) = k_prefactor(&params, r, 0.0, alphas).unwrap();
            let c = (PI * r / 2.0).cos();
            let s = (PI * r / 2.0).sin();
            let expect = c.powf((alphas[1] - alphas[2]).powi(2)) * s.powf((alphas[0] - alphas[1]).powi(2));
            assert_abs_diff_eq!(scale.norm(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn prefactor_rate_reduces_for_equal_rear_charges() {
        let params = ModelParams::new(0.8).unwrap();
        let r = 0.42;
        let a = 0.6;
        let (_, rate) = k_prefactor(&params, r, 0.0, [0.0, 0.0, a, a]).unwrap();
        assert_abs_diff_eq!(rate, params.beta() * r * a / 2.0, epsilon = 1e-14);

        let (_, rate) = k_prefactor(&params, r, 0.0, [a, a, a, a]).unwrap();
        assert_abs_diff_eq!(rate, params.beta() * r * a, epsilon = 1e-14);
    }

    #[test]
    fn charge_balance_is_enforced() {
        let params = ModelParams::default();
        assert!(matches!(
            k_prefactor(&params, 0.5, 0.0, [1.0, 0.0, 0.0, 0.0]),
            Err(Error::ChargeBalance { .. })
        ));
    }

    #[test]
    fn charged_derivative_moment_matches_hand_residue() {
        // Normalised by its theta = 0 value, the second moment of one
        // derivative mode against the charged vacuum is
        //   exp(i beta theta r a / 2) [ cc + a^2 ss^2 - b^2 t^2 sin^2(pi r)/(4 pi^2)
        //                               + i a b t sin(pi r) ss / pi ] / (cc + a^2 ss^2)
        // with cc = cos^2(pi r/2), ss = sin^2(pi r/2).
        let params = ModelParams::new(1.15).unwrap();
        let (r, a) = (0.39, 0.8);
        let one = ChiralModeList::new(vec![1]).unwrap();
        let empty = ChiralModeList::empty();
        let f = f2_chiral(&params, r, [&one, &one, &empty, &empty], [0.0, 0.0, a, a]).unwrap();
        let beta = params.beta();
        let cc = (PI * r / 2.0).cos().powi(2);
        let ss = (PI * r / 2.0).sin().powi(2);
        for theta in [0.0, 0.7, -1.3] {
            let bracket = Complex64::new(
                cc + a * a * ss * ss - beta * beta * theta * theta * (PI * r).sin().powi(2) / (4.0 * PI * PI),
                a * beta * theta * (PI * r).sin() * ss / PI,
            );
            let expect = Complex64::from_polar(1.0, beta * theta * r * a / 2.0) * bracket
                / Complex64::new(cc + a * a * ss * ss, 0.0);
            let got = f.eval(theta) / f.eval(0.0);
            close(got, expect, 1e-12);
        }
    }

    #[test]
    fn neutral_derivative_moment_matches_closed_form() {
        // F2 of one derivative mode against the vacuum, normalised by its
        // theta = 0 value: 1 - beta^2 theta^2 sin^2(pi r/2)/pi^2.
        let params = ModelParams::new(1.3).unwrap();
        let r = 0.53;
        let one = ChiralModeList::new(vec![1]).unwrap();
        let empty = ChiralModeList::empty();
        let f = f2_chiral(&params, r, [&one, &one, &empty, &empty], [0.0; 4]).unwrap();
        let theta = 0.9;
        let s = (PI * r / 2.0).sin();
        let expect = 1.0 - (params.beta() * theta * s / PI).powi(2);
        let got = f.eval(theta) / f.eval(0.0);
        close(got, Complex64::new(expect, 0.0), 1e-12);
    }

    #[test]
    fn half_interval_fast_path_matches_generic() {
        let params = ModelParams::new(1.2).unwrap();
        let eleven = ChiralModeList::new(vec![1, 1]).unwrap();
        let two = ChiralModeList::new(vec![2]).unwrap();
        let empty = ChiralModeList::empty();
        let cases: [([&ChiralModeList; 4], [f64; 4]); 3] = [
            ([&eleven, &two, &eleven, &two], [0.0; 4]),
            ([&two, &empty, &empty, &two], [0.4, 0.1, -0.2, 0.1]),
            ([&eleven, &eleven, &empty, &empty], [0.0, 0.0, 0.65, 0.65]),
        ];
        for (modes, alphas) in cases {
            let generic = f2_chiral(&params, 0.5, modes, alphas).unwrap();
            let fast = f2_chiral_half(&params, modes, alphas).unwrap();
            assert_abs_diff_eq!(generic.phase_rate, fast.phase_rate, epsilon = 1e-13);
            for theta in [-1.1, 0.0, 0.6, 2.3] {
                close(generic.eval(theta), fast.eval(theta), 1e-12);
            }
        }
    }

    #[test]
    fn level2_combination_matches_printed_polynomial() {
        // The assembled seven-term excess has the closed form
        //   Re = b^8 t^8 s^8/(4096 pi^8) - b^6 t^6 (41 + 23 c2) s^6/(2048 pi^6)
        //      + b^4 t^4 (3129 + 1460 c2 + 19 c4) s^4/(16384 pi^4)
        //      + b^2 t^2 (-24826 - 9417 c2 + 1386 c4 + 89 c6) s^2/(32768 pi^2)
        //   Im = the sum of the two odd seven-term members evaluated at b t
        // with s = sin(pi r), cj = cos(j pi r).
        let params = ModelParams::new(1.0).unwrap();
        for (r, theta) in [(0.3, 0.8), (0.62, -1.7), (0.5, 1.1), (0.17, 2.9)] {
            let got = delta_z2(&params, r, theta).unwrap();
            let (b, t) = (params.beta(), theta);
            let s = (PI * r).sin();
            let (c1, c2, c3) = ((PI * r).cos(), (2.0 * PI * r).cos(), (3.0 * PI * r).cos());
            let (c4, c5, c6) = ((4.0 * PI * r).cos(), (5.0 * PI * r).cos(), (6.0 * PI * r).cos());
            let bt = b * t;
            let re = bt.powi(8) * s.powi(8) / (4096.0 * PI.powi(8))
                - bt.powi(6) * (41.0 + 23.0 * c2) * s.powi(6) / (2048.0 * PI.powi(6))
                + bt.powi(4) * (3129.0 + 1460.0 * c2 + 19.0 * c4) * s.powi(4)
                    / (16384.0 * PI.powi(4))
                + bt * bt * (-24826.0 - 9417.0 * c2 + 1386.0 * c4 + 89.0 * c6) * s * s
                    / (32768.0 * PI * PI);
            let f6 = -bt.powi(3) * s.powi(3) * c1 * (4.0 * c2 - 17.0 * c4 + 141.0)
                / (1024.0 * PI.powi(3))
                + bt.powi(5) * s.powi(5) * c1.powi(3) / (16.0 * PI.powi(5))
                - bt * s.powi(3) * (754.0 * c1 + 5.0 * c3 + 9.0 * c5) / (2048.0 * PI);
            let f7 = -bt.powi(7) * s.powi(7) * c1 / (256.0 * PI.powi(7))
                + bt.powi(5) * s.powi(5) * (67.0 * c1 - 3.0 * c3) / (1024.0 * PI.powi(5))
                - bt.powi(3) * s.powi(3) * (650.0 * c1 - 143.0 * c3 + 5.0 * c5)
                    / (4096.0 * PI.powi(3))
                - bt * s.powi(3) * (1466.0 * c1 + 73.0 * c3 - 3.0 * c5) / (4096.0 * PI);
            close(got, Complex64::new(re, f6 + f7), 1e-9);
        }
        // At the half interval every odd member carries cos(pi r) = 0.
        let half = delta_z2(&params, 0.5, 1.3).unwrap();
        assert_abs_diff_eq!(half.im, 0.0, epsilon = 1e-12);
        let zero = delta_z2(&params, 0.35, 0.0).unwrap();
        assert_abs_diff_eq!(zero.norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn four_derivative_moment_matches_quartic_closed_form() {
        // F2({1},{1},{1},{1}) = b^4 t^4 sin^4(pi r)/(16 pi^4)
        //   + b^2 t^2 sin^2(pi r)(cos(2 pi r) - 9)/(16 pi^2)
        //   + (cos(2 pi r) + 7)^2 / 64.
        let params = ModelParams::new(1.05).unwrap();
        let r = 0.44;
        let one = ChiralModeList::new(vec![1]).unwrap();
        let f = f2_chiral(&params, r, [&one, &one, &one, &one], [0.0; 4]).unwrap();
        let bt = params.beta() * 0.85;
        let s2 = (PI * r).sin().powi(2);
        let c2 = (2.0 * PI * r).cos();
        let expect = bt.powi(4) * s2 * s2 / (16.0 * PI.powi(4))
            + bt * bt * s2 * (c2 - 9.0) / (16.0 * PI * PI)
            + (c2 + 7.0) * (c2 + 7.0) / 64.0;
        close(f.eval(0.85), Complex64::new(expect, 0.0), 1e-12);
    }
}
