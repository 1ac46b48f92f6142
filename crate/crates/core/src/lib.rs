//! Single-excitation dynamics under excitation-preserving Hamiltonians and
//! the phase-space negativity budgets they redistribute.
//!
//! * [`fock`]: truncated Fock-space states, operators, partial traces.
//! * [`phase_space`]: Wigner fields, negativity quadrature, closed forms.
//! * [`dynamics`]: two-qubit exchange, PST chains, beam splitter, damping.
//! * [`budget`]: resource trajectories, tracking gap and infidelity.
//! * [`dwigner`]: odd-prime discrete Wigner functions.
//! * [`cli`]: the `negbudget` command line.

pub mod budget;
pub mod cli;
pub mod dwigner;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod phase_space;
pub mod sum;

pub use error::{Error, Result};

/// Rounds to 12 significant digits, then prints the shortest string that
/// parses back to the rounded value.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:?}")
}
