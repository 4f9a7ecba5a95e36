//! Split-and-match residue engine for generalized charged moments.
//!
//! A moment of oscillator-excited states is a finite sum over ways of
//! splitting the inserted modes into "vertex" insertions (each contributing
//! a weight linear in the flux `theta`) and contracted pairs (each
//! contributing a flux-independent pair value). Both ingredients are
//! residues of explicit rational functions at the insertion points of the
//! relevant replica geometry and are evaluated here through exact
//! [`TaylorSeries`] algebra, never numerical differentiation.
//!
//! The replica geometry enters only through [`Kernel`]: the one-interval
//! first moment uses two insertion points on the unit circle, the second
//! moment four points on its double cover.

use crate::error::{Error, Result};
use crate::series::TaylorSeries;
use crate::types::ModelParams;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Exhaustive split/match enumeration is exponential in the mode count;
/// beyond this budget requests are rejected.
pub const MODE_BUDGET: usize = 14;

/// Insertion geometry for the `n`-th moment (`n` is 1 or 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    replicas: u8,
    ratio: f64,
}

impl Kernel {
    /// Geometry of the first moment: insertions `exp(+i pi r)`, `exp(-i pi r)`.
    pub fn single(ratio: f64) -> Result<Self> {
        Self::new(1, ratio)
    }

    /// Geometry of the second moment: four insertions on the double cover.
    pub fn double(ratio: f64) -> Result<Self> {
        Self::new(2, ratio)
    }

    fn new(replicas: u8, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                value: ratio,
                requirement: "must lie strictly between 0 and 1",
            });
        }
        Ok(Self { replicas, ratio })
    }

    /// Number of replicas `n`.
    pub fn replicas(&self) -> u8 {
        self.replicas
    }

    /// Number of insertion points, `2n`.
    pub fn sheets(&self) -> usize {
        2 * self.replicas as usize
    }

    /// Interval fraction `r`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Orientation sign of an insertion: `+1` for incoming (even index),
    /// `-1` for outgoing (odd index).
    pub fn sign(sheet: usize) -> f64 {
        if sheet % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Insertion point `y_sheet` on the unit circle (or its double cover).
    pub fn insertion(&self, sheet: usize) -> Complex64 {
        let r = self.ratio;
        match self.replicas {
            1 => match sheet {
                0 => Complex64::from_polar(1.0, PI * r),
                1 => Complex64::from_polar(1.0, -PI * r),
                _ => panic!("first-moment kernel has 2 insertions, asked for {sheet}"),
            },
            2 => match sheet {
                0 => Complex64::from_polar(1.0, PI * r / 2.0),
                1 => Complex64::from_polar(1.0, -PI * r / 2.0),
                2 => -Complex64::from_polar(1.0, PI * r / 2.0),
                3 => -Complex64::from_polar(1.0, -PI * r / 2.0),
                _ => panic!("second-moment kernel has 4 insertions, asked for {sheet}"),
            },
            n => panic!("unsupported replica number {n}"),
        }
    }

    /// The mode function `f_sheet(z)` expanded around `center`.
    ///
    /// For one replica this is `z - conj(y)`; on the double cover it is
    /// `(z^2 - conj(y^2)) / (z + y)`, regular at every insertion point.
    pub fn mode_function(&self, sheet: usize, center: Complex64, order: usize) -> TaylorSeries {
        let y = self.insertion(sheet);
        match self.replicas {
            1 => TaylorSeries::linear_shift(y.conj(), center, order),
            2 => {
                let mut num = vec![Complex64::ZERO; order + 1];
                num[0] = center * center - (y * y).conj();
                if order >= 1 {
                    num[1] = 2.0 * center;
                }
                if order >= 2 {
                    num[2] = Complex64::ONE;
                }
                let numerator = TaylorSeries::from_coeffs(center, num);
                let denominator = TaylorSeries::linear_shift(-y, center, order)
                    .reciprocal()
                    .expect("z + y is nonzero at every insertion point");
                numerator.mul(&denominator)
            }
            n => panic!("unsupported replica number {n}"),
        }
    }
}

/// Flux-linear weight of a single uncontracted mode: `W = c0 + c1 * theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexWeight {
    /// Flux-independent part, sourced by the vertex charges.
    pub c0: Complex64,
    /// Coefficient of `theta` (compactification factor folded in).
    pub c1: Complex64,
}

/// Weight of one mode of index `k` left uncontracted on `sheet`.
///
/// `alphas` are the unsigned vertex charges of the `2n` insertions; the
/// alternating orientation signs are applied internally. When
/// `include_charge_terms` is false the charge-sourced constant part is
/// skipped (it cancels identically for the first moment).
pub fn vertex_weight(
    kernel: &Kernel,
    params: &ModelParams,
    sheet: usize,
    k: u32,
    alphas: &[f64],
    include_charge_terms: bool,
) -> Result<VertexWeight> {
    let order = 2 * k as usize + 2;
    let y = kernel.insertion(sheet);
    let sigma = Kernel::sign(sheet);
    let fk = kernel.mode_function(sheet, y, order).powi(k);

    // Flux contraction: sigma/(2 pi) * [coefficient of delta^{k-1} in f^k / z].
    let inv_z = TaylorSeries::identity(y, order).reciprocal()?;
    let c1 = fk.mul(&inv_z).coeff(k as usize - 1) * (sigma * params.beta() / (2.0 * PI));

    let mut c0 = Complex64::ZERO;
    if include_charge_terms {
        debug_assert_eq!(alphas.len(), kernel.sheets());
        for (i, &alpha) in alphas.iter().enumerate() {
            if alpha == 0.0 {
                continue;
            }
            let signed_alpha = alpha * Kernel::sign(i);
            let j_ij = if i == sheet {
                // Self term: coefficient of delta^k in f^k.
                fk.coeff(k as usize)
            } else {
                // Cross term: coefficient of delta^{k-1} in f^k / (z - y_i).
                let pole = TaylorSeries::linear_shift(kernel.insertion(i), y, order).reciprocal()?;
                fk.mul(&pole).coeff(k as usize - 1)
            };
            c0 += signed_alpha * j_ij;
        }
        c0 *= sigma;
    }

    Ok(VertexWeight { c0, c1 })
}

/// Raw contraction value of two modes `(sheet_p, kp)` and `(sheet_r, kr)`,
/// in the convention where the engine divides by `4 pi^2`.
///
/// Orientation signs of both contours are included. Same-sheet pairs are
/// evaluated through the regularised self-contraction.
pub fn pair_value(kernel: &Kernel, sheet_p: usize, sheet_r: usize, kp: u32, kr: u32) -> Result<Complex64> {
    let order = 2 * (kp.max(kr) as usize) + 2;
    let sigma = Kernel::sign(sheet_p) * Kernel::sign(sheet_r);
    let y_p = kernel.insertion(sheet_p);
    let y_r = kernel.insertion(sheet_r);

    // Coefficients a_m of f_r^{kr} around its own insertion point.
    let a = kernel.mode_function(sheet_r, y_r, order).powi(kr);
    let fp = kernel.mode_function(sheet_p, y_p, order).powi(kp);

    let mut x = Complex64::ZERO;
    if sheet_p == sheet_r {
        // Self-contraction: sum_j (j+1) a_{kr-1-j} b_{kp+1+j} with b the
        // coefficients of f_p^{kp} around the shared point.
        for j in 0..kr as usize {
            x += ((j + 1) as f64) * a.coeff(kr as usize - 1 - j) * fp.coeff(kp as usize + 1 + j);
        }
    } else {
        // Cross contraction: expand the second-order pole around y_p.
        let shift = TaylorSeries::linear_shift(y_r, y_p, order);
        for j in 0..kr as usize {
            let pole = shift.powi(j as u32 + 2).reciprocal()?;
            let product = fp.mul(&pole);
            x += ((j + 1) as f64) * a.coeff(kr as usize - 1 - j) * product.coeff(kp as usize - 1);
        }
    }
    Ok(4.0 * PI * PI * sigma * x)
}

/// Closed form of the first-moment contraction: `4 pi^2 kp` for modes of
/// equal index on opposite insertions, zero otherwise.
pub fn pair_value_n1(sheet_p: usize, sheet_r: usize, kp: u32, kr: u32) -> Complex64 {
    if sheet_p != sheet_r && kp == kr {
        Complex64::new(4.0 * PI * PI * f64::from(kp), 0.0)
    } else {
        Complex64::ZERO
    }
}

/// Second-moment contraction on the double cover, by exact residue algebra.
pub fn pair_value_n2(ratio: f64, sheet_p: usize, sheet_r: usize, kp: u32, kr: u32) -> Result<Complex64> {
    pair_value(&Kernel::double(ratio)?, sheet_p, sheet_r, kp, kr)
}

/// One inserted mode: which insertion point it sits on and its index.
pub type Mode = (usize, u32);

/// Sum over all vertex/pair splits and perfect matchings for the given
/// modes, as polynomial coefficients in `theta` (constant term first).
///
/// This is the normalisation-free positional core shared by the first- and
/// second-moment evaluators; callers multiply by state norms and overall
/// prefactors afterwards.
pub fn positional_sum(
    kernel: &Kernel,
    params: &ModelParams,
    modes: &[Mode],
    alphas: &[f64],
    include_charge_terms: bool,
) -> Result<Vec<Complex64>> {
    let m = modes.len();
    if m > MODE_BUDGET {
        return Err(Error::ModeBudget {
            count: m,
            max: MODE_BUDGET,
        });
    }

    let mut weights = Vec::with_capacity(m);
    for &(sheet, k) in modes {
        weights.push(vertex_weight(kernel, params, sheet, k, alphas, include_charge_terms)?);
    }

    // Contraction table; normalised so the engine sums plain products.
    let mut d = vec![vec![Complex64::ZERO; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let value = pair_value(kernel, modes[i].0, modes[j].0, modes[i].1, modes[j].1)?
                / (4.0 * PI * PI);
            d[i][j] = value;
            d[j][i] = value;
        }
    }

    let mut total = vec![Complex64::ZERO; m + 1];
    total[0] += Complex64::ZERO;
    let mut scratch = Vec::with_capacity(m);

    for mask in 0u32..(1u32 << m) {
        let paired = mask.count_ones() as usize;
        if paired % 2 != 0 {
            continue;
        }
        scratch.clear();
        for (i, _) in modes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                scratch.push(i);
            }
        }
        let pair_sum = matching_sum(&scratch, &d);
        if pair_sum == Complex64::ZERO {
            continue;
        }

        // Polynomial product of the uncontracted weights.
        let mut poly = vec![Complex64::ONE];
        for (i, w) in weights.iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            let mut next = vec![Complex64::ZERO; poly.len() + 1];
            for (jj, &c) in poly.iter().enumerate() {
                next[jj] += c * w.c0;
                next[jj + 1] += c * w.c1;
            }
            poly = next;
        }
        for (jj, &c) in poly.iter().enumerate() {
            total[jj] += pair_sum * c;
        }
    }
    Ok(total)
}

/// Sum over perfect matchings of `items` of the product of table entries;
/// `1` for the empty set. `(2l-1)!!` terms for `2l` items.
fn matching_sum(items: &[usize], d: &[Vec<Complex64>]) -> Complex64 {
    if items.is_empty() {
        return Complex64::ONE;
    }
    let first = items[0];
    let mut acc = Complex64::ZERO;
    let mut rest: Vec<usize> = Vec::with_capacity(items.len() - 2);
    for pick in 1..items.len() {
        let value = d[first][items[pick]];
        if value == Complex64::ZERO {
            continue;
        }
        rest.clear();
        rest.extend(items[1..].iter().filter(|&&x| x != items[pick]).copied());
        acc += value * matching_sum(&rest, d);
    }
    acc
}
