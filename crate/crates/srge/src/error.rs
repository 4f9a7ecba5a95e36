//! Error type shared by every layer of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the series engine, the moment
/// evaluators, the resolved layer, and the lattice backends.
#[derive(Debug, Error)]
pub enum Error {
    /// A chiral mode index was zero; mode lists hold positive integers.
    #[error("chiral mode indices must be positive, got 0")]
    ZeroMode,

    /// Too many oscillator modes for the exhaustive split/matching sums.
    #[error("mode budget exceeded: {count} modes across all insertions, limit is {max}")]
    ModeBudget { count: usize, max: usize },

    /// A model or geometry parameter was outside its domain.
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Vertex charges violate neutrality within a chirality, so the moment
    /// is not defined (as opposed to being identically zero).
    #[error("vertex charge balance violated: {detail}")]
    ChargeBalance { detail: String },

    /// A Taylor coefficient beyond the stored truncation order was requested.
    #[error("series order exceeded: needed coefficient {needed}, series holds {have}")]
    SeriesOrder { needed: usize, have: usize },

    /// Division by a series whose leading coefficient vanishes.
    #[error("series reciprocal at a zero of the denominator (|c0| = {magnitude:.3e})")]
    SeriesDivision { magnitude: f64 },

    /// A state specification string failed to parse.
    #[error("state spec parse error at byte {position}: expected {expected}, found {found:?}")]
    StateSpec {
        position: usize,
        expected: &'static str,
        found: String,
    },

    /// A moment polynomial fed to the resolved layer carried a nonzero
    /// phase rate where a plain polynomial was required.
    #[error("moment carries phase rate {rate:.3e}; strip or handle the linear phase first")]
    ResidualPhaseRate { rate: f64 },

    /// A moment polynomial mixes parities beyond tolerance, so the
    /// even-power saddle-point formulas do not apply.
    #[error("odd/even parity violation in moment coefficients: |c_{index}| = {magnitude:.3e}")]
    ParityViolation { index: usize, magnitude: f64 },

    /// The effective Gaussian width for the charge distribution collapsed.
    #[error("charge distribution width collapsed: log-cutoff minus 2*pi^2*h2 = {b1:.6} <= 0")]
    WidthCollapsed { b1: f64 },

    /// The leading moment coefficient must be real and positive for the
    /// entropy formulas to make sense.
    #[error("leading moment coefficient f0 = {f0:.6e} is not positive")]
    NonPositiveLeading { f0: f64 },

    /// Branch tracking of the determinant square root failed to converge.
    #[error("square-root branch tracking failed to stabilise after {steps} subdivisions")]
    BranchTracking { steps: usize },

    /// A dense many-body computation was requested beyond the size cap.
    #[error("chain of {n_sites} sites exceeds the dense-oracle cap of {max} sites")]
    OracleTooLarge { n_sites: usize, max: usize },

    /// Mismatched dimensions between objects that must agree.
    #[error("dimension mismatch: {detail}")]
    Dimension { detail: String },

    /// A momentum state was malformed (duplicate or non-half-integer modes,
    /// or modes incompatible with the chain length).
    #[error("invalid momentum state: {detail}")]
    MomentumState { detail: String },

    /// The half-interval fast path only tabulates binomial weights up to a
    /// fixed mode index.
    #[error("half-interval fast path supports mode indices up to {max}, got {k}")]
    HalfPathMode { k: u32, max: u32 },

    /// A charge sector carried no weight, so a per-sector quantity is
    /// undefined.
    #[error("charge sector q = {q} has vanishing weight")]
    EmptySector { q: i64 },
}
