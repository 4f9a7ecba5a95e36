//! Dense many-body reference computations on small chains.
//!
//! Everything here works with explicit state vectors over the full Fock
//! space of `N <= 14` sites, so it is slow but assumption-free: reduced
//! generalized density matrices by direct partial trace, charged moments by
//! matrix products, resolved entropies by both the charge-projector and the
//! discrete-Fourier route. The determinant-based lattice layer is gated
//! against these results in the test suite.
//!
//! Basis conventions: basis state `|mask>` applies creation operators in
//! ascending site order (site 0 leftmost). The subsystem is always the
//! first `ell` sites, i.e. the low `ell` bits, which keeps the fermionic
//! partial trace free of extra signs.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest chain the dense oracle accepts.
pub const MAX_SITES: usize = 14;

/// A dense many-body state over `n_sites` fermionic modes.
#[derive(Debug, Clone)]
pub struct DenseState {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// The Fock vacuum.
    pub fn vacuum(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::OracleTooLarge {
                n_sites,
                max: MAX_SITES,
            });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_sites];
        amps[0] = Complex64::ONE;
        Ok(Self { n_sites, amps })
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Amplitudes in the occupation basis.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Applies the site creation operator `c_site^dag` with the Jordan-Wigner
    /// sign `(-1)^(occupied sites below)`.
    pub fn create_site(&mut self, site: usize) {
        assert!(site < self.n_sites, "site {site} out of range");
        let bit = 1usize << site;
        let below = bit - 1;
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (mask, &a) in self.amps.iter().enumerate() {
            if a == Complex64::ZERO || mask & bit != 0 {
                continue;
            }
            let sign = if ((mask & below).count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[mask | bit] = sign * a;
        }
        self.amps = out;
    }

    /// Applies the momentum-mode creation operator
    /// `(1/sqrt(N)) sum_m exp(i theta m) c_m^dag`.
    pub fn create_momentum(&mut self, theta: f64) {
        let n = self.n_sites;
        let norm = 1.0 / (n as f64).sqrt();
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for site in 0..n {
            let phase = Complex64::from_polar(norm, theta * site as f64);
            let bit = 1usize << site;
            let below = bit - 1;
            for (mask, &a) in self.amps.iter().enumerate() {
                if a == Complex64::ZERO || mask & bit != 0 {
                    continue;
                }
                let sign = if ((mask & below).count_ones()) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                out[mask | bit] += sign * phase * a;
            }
        }
        self.amps = out;
    }

    /// Builds the Slater state of the given momentum angles, applying the
    /// creation operators so the smallest angle sits leftmost.
    ///
    /// Matching the orbital ordering of the determinant route requires both
    /// sides to sort momenta the same way; callers should pass angles in
    /// ascending order.
    pub fn from_momenta(n_sites: usize, thetas: &[f64]) -> Result<Self> {
        let mut state = Self::vacuum(n_sites)?;
        for &theta in thetas.iter().rev() {
            state.create_momentum(theta);
        }
        Ok(state)
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }
}

/// Generalized reduced density matrix `Tr_B |psi_in><psi_out|` over the
/// first `ell` sites.
pub fn reduce(psi_in: &DenseState, psi_out: &DenseState, ell: usize) -> Result<DMatrix<Complex64>> {
    let n = psi_in.n_sites;
    if psi_out.n_sites != n {
        return Err(Error::Dimension {
            detail: format!(
                "states live on {} and {} sites",
                psi_in.n_sites, psi_out.n_sites
            ),
        });
    }
    if ell == 0 || ell >= n {
        return Err(Error::Dimension {
            detail: format!("subsystem of {ell} sites inside a chain of {n}"),
        });
    }
    let da = 1usize << ell;
    let db = 1usize << (n - ell);
    let mut rho = DMatrix::<Complex64>::zeros(da, da);
    for y in 0..db {
        let base = y << ell;
        for x in 0..da {
            let ax = psi_in.amps[base | x];
            if ax == Complex64::ZERO {
                continue;
            }
            for xp in 0..da {
                rho[(x, xp)] += ax * psi_out.amps[base | xp].conj();
            }
        }
    }
    Ok(rho)
}

/// Diagonal of the charge projector onto subsystem particle number `n_a`.
pub fn charge_projector(ell: usize, n_a: usize) -> Vec<bool> {
    (0..(1usize << ell))
        .map(|mask| mask.count_ones() as usize == n_a)
        .collect()
}

/// Trace of a subsystem operator against the projector onto particle
/// number `n_a`.
pub fn sector_trace(matrix: &DMatrix<Complex64>, n_a: usize) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (mask, keep) in charge_projector(matrix.nrows().trailing_zeros() as usize, n_a)
        .into_iter()
        .enumerate()
    {
        if keep {
            acc += matrix[(mask, mask)];
        }
    }
    acc
}

/// Charged moment `Tr[ rho_(2n-1,2n) ... rho_(1,2) exp(i theta (N_A - ell/2)) ]`
/// from dense states; `states` holds the `2n` states in trace order.
pub fn charged_moment_ed(states: &[&DenseState], ell: usize, theta: f64) -> Result<Complex64> {
    let product = rdm_product(states, ell)?;
    let mut acc = Complex64::ZERO;
    for x in 0..product.nrows() {
        let charge = (x.count_ones() as f64) - ell as f64 / 2.0;
        acc += product[(x, x)] * Complex64::from_polar(1.0, theta * charge);
    }
    Ok(acc)
}

/// Ordered product `rho_(2n-1,2n) ... rho_(3,4) rho_(1,2)` of generalized
/// reduced density matrices.
pub fn rdm_product(states: &[&DenseState], ell: usize) -> Result<DMatrix<Complex64>> {
    if states.is_empty() || states.len() % 2 != 0 {
        return Err(Error::Dimension {
            detail: format!("need an even number of states, got {}", states.len()),
        });
    }
    let mut product: Option<DMatrix<Complex64>> = None;
    for pair in states.chunks(2) {
        let rho = reduce(pair[0], pair[1], ell)?;
        product = Some(match product {
            None => rho,
            Some(p) => rho * p,
        });
    }
    Ok(product.expect("at least one pair"))
}

/// Symmetry-resolved second-Rényi data by direct charge projection:
/// `(1/(1-n)) log [ Tr(prod rho Pi_q) / Tr(rho_gs^n Pi_q) ]` where `n` is
/// half the number of `states` and `q` the raw subsystem particle number.
pub fn srre_projected(
    states: &[&DenseState],
    ground: &DenseState,
    ell: usize,
    n_a: usize,
) -> Result<Complex64> {
    let n = states.len() / 2;
    let numerator = sector_trace(&rdm_product(states, ell)?, n_a);
    let gs: Vec<&DenseState> = std::iter::repeat_n(ground, 2 * n).collect();
    let denominator = sector_trace(&rdm_product(&gs, ell)?, n_a);
    if denominator.norm() < 1e-300 {
        return Err(Error::EmptySector { q: n_a as i64 });
    }
    let ratio = numerator / denominator;
    Ok((ratio.ln()) / (1.0 - n as f64))
}

/// The same resolved data through the flux route: charged moments on the
/// `ell + 1` discrete flux nodes `theta_j = 2 pi j/(ell + 1)`, inverted by
/// an exact finite Fourier transform in the uncentered charge.
pub fn srre_fourier(
    states: &[&DenseState],
    ground: &DenseState,
    ell: usize,
    n_a: usize,
) -> Result<Complex64> {
    let n = states.len() / 2;
    let gs: Vec<&DenseState> = std::iter::repeat_n(ground, 2 * n).collect();
    let nodes = ell + 1;
    let mut numerator = Complex64::ZERO;
    let mut denominator = Complex64::ZERO;
    for j in 0..nodes {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        // Recenter the moment's charge so the transform runs over the raw
        // particle number 0..=ell.
        let weight = Complex64::from_polar(1.0, -theta * (n_a as f64 - ell as f64 / 2.0))
            / nodes as f64;
        numerator += weight * charged_moment_ed(states, ell, theta)?;
        denominator += weight * charged_moment_ed(&gs, ell, theta)?;
    }
    if denominator.norm() < 1e-300 {
        return Err(Error::EmptySector { q: n_a as i64 });
    }
    Ok(((numerator / denominator).ln()) / (1.0 - n as f64))
}
