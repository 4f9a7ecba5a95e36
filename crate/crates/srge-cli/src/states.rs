//! Resolution of state names given on the command line.
//!
//! Chain states are either dictionary names (`ground`, `particle-hole`,
//! `vertex`, `level2-a`, `level2-b`) or explicit doubled-momentum lists
//! like `[-3,-1,1,5]` (odd integers, twice the half-odd-integer momentum
//! index). Field-theory states use the `L=[..];R=[..];n=..;m=..` spec
//! grammar of the library.

use crate::failure::Failure;
use srge::lattice::MomentumState;

/// Resolves one chain-state name or doubled-momentum list.
pub fn lattice_state(name: &str, n_sites: usize) -> Result<MomentumState, Failure> {
    let trimmed = name.trim();
    match trimmed {
        "ground" => Ok(MomentumState::ground(n_sites)?),
        "particle-hole" => Ok(MomentumState::particle_hole(n_sites)?),
        "vertex" => Ok(MomentumState::vertex(n_sites)?),
        "level2-a" => Ok(MomentumState::level2_a(n_sites)?),
        "level2-b" => Ok(MomentumState::level2_b(n_sites)?),
        list if list.starts_with('[') && list.ends_with(']') => {
            let body = &list[1..list.len() - 1];
            let momenta: Vec<i64> = body
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim().parse::<i64>().map_err(|e| {
                        Failure::Usage(format!("momentum list {list:?}: {e}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            Ok(MomentumState::new(n_sites, momenta)?)
        }
        other => Err(Failure::Usage(format!(
            "unknown state {other:?}; expected ground, particle-hole, vertex, \
             level2-a, level2-b, or a doubled-momentum list like [-3,-1,1,5]"
        ))),
    }
}

/// Splits a pipe-separated list of state names or specs. Pipes are used
/// because field-theory specs contain semicolons internally.
pub fn split_states(text: &str) -> Vec<String> {
    text.split('|')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
