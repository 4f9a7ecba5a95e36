//! Guide chapters compiled as documentation tests.
//!
//! Each module below embeds one chapter of the `book/` guide, so every
//! code snippet in the book runs under `cargo test --doc` and cannot
//! drift from the library.

#[doc = include_str!("../../../README.md")]
mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/states.md")]
mod states {}

#[doc = include_str!("../../../book/src/charged-moments.md")]
mod charged_moments {}

#[doc = include_str!("../../../book/src/charge-distributions.md")]
mod charge_distributions {}

#[doc = include_str!("../../../book/src/lattice.md")]
mod lattice {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
