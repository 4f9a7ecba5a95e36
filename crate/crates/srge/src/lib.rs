//! Generalized charged moments, charge distributions, and symmetry-resolved
//! Rényi entropies for excited states of the free compact boson, with exact
//! lattice cross-checks on the XX spin chain.
//!
//! The crate is organised in three layers:
//!
//! * a field-theory layer ([`moments1`], [`moments2`]) that evaluates the
//!   first and second generalized charged moments of bosonic excited states
//!   as exact polynomials in the flux `θ` times a linear phase, built on a
//!   truncated-series residue engine ([`series`], [`wick`]);
//! * a resolved layer ([`resolved`]) that converts those moments into
//!   subsystem charge distributions and symmetry-resolved second Rényi
//!   entropies through saddle-point expansions in the inverse log-cutoff;
//! * a lattice layer ([`lattice`], [`oracle`]) that computes the same
//!   quantities for the XX chain from free-fermion determinants and, for
//!   small chains, from dense many-body linear algebra.
//!
//! States are described by [`types::BosonState`] (chiral mode content plus
//! vertex charges) on the field-theory side and by
//! [`lattice::MomentumState`] (occupied fermion momenta) on the chain side.

pub mod error;
pub mod lattice;
pub mod moments1;
pub mod moments2;
pub mod oracle;
pub mod resolved;
pub mod series;
pub mod statespec;
pub mod types;
pub mod wick;

mod doctests;

pub use error::{Error, Result};
