//! Shared helpers for the acceptance suite: independently transcribed
//! closed-form evaluators, a brute-force contour-quadrature contraction
//! oracle, and a small least-squares utility. Nothing here calls into the
//! engine's series algebra, so agreement is a genuine cross-check.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Panics with context when two complex values differ beyond `tol`;
/// returns the deviation so callers can report their worst case.
pub fn assert_close(tag: &str, got: Complex64, want: Complex64, tol: f64) -> f64 {
    let dev = (got - want).norm();
    assert!(
        dev.is_finite() && dev <= tol,
        "{tag}: got {got}, want {want}, |dev| = {dev:.3e} > {tol:.1e}"
    );
    dev
}

/// Ordinary least squares for `y = intercept + slope * x`; returns
/// `(intercept, slope, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need matched samples");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    (intercept, slope, 1.0 - ss_res / ss_tot)
}

/// Closed forms of the level-1 and level-2 moments, transcribed directly
/// from their printed expressions.
pub mod golden {
    use super::*;

    /// First moment of one mode of index `k` against itself:
    /// `1 - b^2 t^2 sin^2(k pi r)/(k pi^2)`.
    pub fn f1_single_mode(beta: f64, theta: f64, r: f64, k: u32) -> Complex64 {
        let s = (f64::from(k) * PI * r).sin();
        Complex64::new(
            1.0 - beta * beta * theta * theta * s * s / (f64::from(k) * PI * PI),
            0.0,
        )
    }

    /// First moment of the bare charged vacuum: `exp(i b t r a)`.
    pub fn f1_vertex(beta: f64, theta: f64, r: f64, alpha: f64) -> Complex64 {
        Complex64::from_polar(1.0, beta * theta * r * alpha)
    }

    /// First moment of the double-one mode list against itself.
    pub fn f1_pair_pair(beta: f64, theta: f64, r: f64) -> Complex64 {
        let bt2 = beta * beta * theta * theta;
        let s2 = (PI * r).sin().powi(2);
        Complex64::new(
            1.0 - 2.0 * bt2 * s2 / (PI * PI) + bt2 * bt2 * s2 * s2 / (2.0 * PI.powi(4)),
            0.0,
        )
    }

    /// Off-diagonal first moment between `{1,1}` and `{2}`:
    /// `-i b^3 t^3 sin^3(pi r) cos(pi r)/pi^3`.
    pub fn f1_pair_two(beta: f64, theta: f64, r: f64) -> Complex64 {
        let bt = beta * theta;
        Complex64::new(
            0.0,
            -bt.powi(3) * (PI * r).sin().powi(3) * (PI * r).cos() / PI.powi(3),
        )
    }

    /// The seven printed level-2 chiral second-moment closed forms,
    /// indexed in their printed order; `bt` is the product of the
    /// compactification parameter and the flux.
    ///
    /// 0: ({1,1},{1,1},{1,1},{1,1})   4: ({2},{2},{2},{2})
    /// 1: ({1,1},{2},{1,1},{2})       5: ({1,1},{2},{2},{2})
    /// 2: ({1,1},{1,1},{2},{2})       6: ({1,1},{1,1},{1,1},{2})
    /// 3: ({1,1},{2},{2},{1,1})
    pub fn f2_level2_form(which: usize, bt: f64, r: f64) -> Complex64 {
        let s = (PI * r).sin();
        let c = (PI * r).cos();
        let cj = |j: f64| (j * PI * r).cos();
        let (c1, c2, c3) = (cj(1.0), cj(2.0), cj(3.0));
        let (c4, c5, c6, c8) = (cj(4.0), cj(5.0), cj(6.0), cj(8.0));
        let ch = (PI * r / 2.0).cos();
        let sh = (PI * r / 2.0).sin();
        match which {
            0 => Complex64::new(
                bt.powi(8) * s.powi(8) / (1024.0 * PI.powi(8))
                    + bt.powi(6) * s.powi(6) * (c2 - 17.0) / (512.0 * PI.powi(6))
                    + bt.powi(4) * s.powi(4) * (5.0 * c4 - 84.0 * c2 + 1359.0)
                        / (4096.0 * PI.powi(4))
                    + bt * bt * s * s * (3.0 * c6 + 142.0 * c4 - 83.0 * c2 - 8254.0)
                        / (8192.0 * PI * PI)
                    + (9.0 * c8 + 1080.0 * c6 + 4604.0 * c4 + 37256.0 * c2 + 88123.0)
                        / 131072.0,
                0.0,
            ),
            1 => Complex64::new(
                -bt.powi(6) * c * c * s.powi(6) / (64.0 * PI.powi(6))
                    + bt.powi(4) * (25.0 * c2 + 23.0) * s.powi(6) / (1024.0 * PI.powi(4))
                    - bt * bt * 3.0 * (7.0 * c2 + 17.0) * s.powi(6) / (512.0 * PI * PI)
                    + 3.0 * (9.0 * c2 + 71.0) * s.powi(6) / 1024.0,
                0.0,
            ),
            2 => Complex64::new(
                -bt.powi(6) * c * c * s.powi(6) / (64.0 * PI.powi(6))
                    + bt.powi(4) / (8.0 * PI.powi(4))
                        * ch.powi(6)
                        * sh.powi(4)
                        * (-2.0 * c3 + 13.0 * c2 + 8.0 * c1 + 17.0)
                    - bt * bt / (32.0 * PI * PI)
                        * ch.powi(6)
                        * sh.powi(2)
                        * (c4 - 34.0 * c3 + 64.0 * c2 - 46.0 * c1 + 143.0)
                    + ch.powi(6) / 128.0
                        * (25.0 * c4 - 118.0 * c3 + 376.0 * c2 - 778.0 * c1 + 623.0),
                0.0,
            ),
            3 => Complex64::new(
                -bt.powi(6) * c * c * s.powi(6) / (64.0 * PI.powi(6))
                    + bt.powi(4) / (8.0 * PI.powi(4))
                        * ch.powi(4)
                        * sh.powi(6)
                        * (2.0 * c3 + 13.0 * c2 - 8.0 * c1 + 17.0)
                    - bt * bt / (32.0 * PI * PI)
                        * ch.powi(2)
                        * sh.powi(6)
                        * (c4 + 34.0 * c3 + 64.0 * c2 + 46.0 * c1 + 143.0)
                    + sh.powi(6) / 128.0
                        * (25.0 * c4 + 118.0 * c3 + 376.0 * c2 + 778.0 * c1 + 623.0),
                0.0,
            ),
            4 => {
                let s2p = (2.0 * PI * r).sin();
                Complex64::new(
                    bt.powi(4) * s2p.powi(4) / (64.0 * PI.powi(4))
                        + bt * bt * s2p * s2p * (9.0 * c4 - 4.0 * c2 - 133.0)
                            / (512.0 * PI * PI)
                        + (81.0 * c8 + 56.0 * c6 + 1628.0 * c4 + 8072.0 * c2 + 22931.0)
                            / 32768.0,
                    0.0,
                )
            }
            5 => Complex64::new(
                0.0,
                -bt.powi(3) * s.powi(3) * c * (4.0 * c2 - 17.0 * c4 + 141.0)
                    / (1024.0 * PI.powi(3))
                    + bt.powi(5) * s.powi(5) * c.powi(3) / (16.0 * PI.powi(5))
                    - bt * s.powi(3) * (754.0 * c1 + 5.0 * c3 + 9.0 * c5) / (2048.0 * PI),
            ),
            6 => Complex64::new(
                0.0,
                -bt.powi(7) * s.powi(7) * c / (256.0 * PI.powi(7))
                    + bt.powi(5) * s.powi(5) * (67.0 * c1 - 3.0 * c3) / (1024.0 * PI.powi(5))
                    - bt.powi(3) * s.powi(3) * (650.0 * c1 - 143.0 * c3 + 5.0 * c5)
                        / (4096.0 * PI.powi(3))
                    - bt * s.powi(3) * (1466.0 * c1 + 73.0 * c3 - 3.0 * c5) / (4096.0 * PI),
            ),
            other => panic!("no printed form {other}"),
        }
    }

    /// Second moment of one derivative mode against the vacuum carrying
    /// vertex charge `alpha`, normalized by its zero-flux value.
    pub fn f2_charged_derivative_ratio(
        beta: f64,
        theta: f64,
        r: f64,
        alpha: f64,
    ) -> Complex64 {
        let cc = (PI * r / 2.0).cos().powi(2);
        let ss = (PI * r / 2.0).sin().powi(2);
        let s = (PI * r).sin();
        let bracket = Complex64::new(
            cc + alpha * alpha * ss * ss
                - beta * beta * theta * theta * s * s / (4.0 * PI * PI),
            alpha * beta * theta * s * ss / PI,
        );
        Complex64::from_polar(1.0, beta * theta * r * alpha / 2.0) * bracket
            / (cc + alpha * alpha * ss * ss)
    }

    /// Second moment of one derivative mode against the neutral vacuum,
    /// normalized by its zero-flux value.
    pub fn f2_derivative_vacuum_ratio(beta: f64, theta: f64, r: f64) -> Complex64 {
        let sh = (PI * r / 2.0).sin();
        Complex64::new(1.0 - (beta * theta * sh / PI).powi(2), 0.0)
    }
}

/// Brute-force evaluation of the double-cover pair contraction as a double
/// contour integral, replacing the engine's residue algebra by trapezoid
/// quadrature on circles.
pub mod quadrature {
    use super::*;

    fn insertion(sheet: usize, ratio: f64) -> Complex64 {
        let half = Complex64::from_polar(1.0, PI * ratio / 2.0);
        match sheet {
            0 => half,
            1 => half.conj(),
            2 => -half,
            3 => -half.conj(),
            other => panic!("double cover has 4 insertions, asked for {other}"),
        }
    }

    fn sign(sheet: usize) -> f64 {
        if sheet % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// The mode function `(z^2 - conj(y^2))/(z + y)`, evaluated pointwise.
    fn mode_function(z: Complex64, y: Complex64) -> Complex64 {
        (z * z - (y * y).conj()) / (z + y)
    }

    /// Contraction of modes `(sheet_p, kp)` and `(sheet_r, kr)`:
    ///
    /// `4 pi^2 s_p s_r (2 pi i)^{-2} oint_z oint_w f_p^{kp}(z)/(z-y_p)^{kp}
    ///  f_r^{kr}(w)/(w-y_r)^{kr} / (z-w)^2 dz dw`
    ///
    /// with the `w` contour nested inside the `z` contour when both
    /// surround the same insertion point.
    pub fn contour_pair_value(
        ratio: f64,
        sheet_p: usize,
        sheet_r: usize,
        kp: u32,
        kr: u32,
    ) -> Complex64 {
        let y_p = insertion(sheet_p, ratio);
        let y_r = insertion(sheet_r, ratio);
        // Radii as large as the insertion spacing allows (the nearest
        // foreign insertion sits 2 sin(pi/4 min(r, 1-r)) >= 0.7 away over
        // the tested ratios); small circles would amplify rounding noise
        // through the 1/(z - y)^k factors.
        let (rho_z, rho_w) = if sheet_p == sheet_r {
            (0.45, 0.225)
        } else {
            (0.25, 0.25)
        };
        let nodes = 512usize;

        let mut acc = Complex64::ZERO;
        for a in 0..nodes {
            let ua = Complex64::from_polar(rho_z, 2.0 * PI * a as f64 / nodes as f64);
            let z = y_p + ua;
            let fz = mode_function(z, y_p).powu(kp) / ua.powu(kp);
            let mut inner = Complex64::ZERO;
            for b in 0..nodes {
                let ub = Complex64::from_polar(rho_w, 2.0 * PI * b as f64 / nodes as f64);
                let w = y_r + ub;
                let fw = mode_function(w, y_r).powu(kr) / ub.powu(kr);
                let d = z - w;
                inner += fw * ub / (d * d);
            }
            acc += fz * ua * inner;
        }
        let sigma = sign(sheet_p) * sign(sheet_r);
        4.0 * PI * PI * sigma * acc / ((nodes * nodes) as f64)
    }
}
