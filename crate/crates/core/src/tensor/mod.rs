//! Dense complex state-vector engine.
//!
//! States are stored as `2^n` amplitudes. Qubit `q` lives at bit position
//! `n - 1 - q` of a basis index, so the binary expansion of an index reads
//! like the bitstring literal it represents (qubit 0 leftmost).
//!
//! Hamiltonians are never materialized at register size here; a
//! [`WeightedTermList`] is applied term by term.

mod kernel;
mod marginal;
mod operator;
mod state;
mod terms;

pub use marginal::{data_marginal, Distribution};
pub use operator::{kron, matrix_exp_hermitian, pauli, HermitianEigen, LocalOperator};
pub use state::StateVector;
pub use terms::{expectation_and_std, Term, WeightedTermList};

pub(crate) use kernel::CompiledGate;

pub use num_complex::Complex64;

/// Library-wide numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of `‖ψ‖²` from one.
    pub norm: f64,
    /// Allowed max-entry deviation of `u u†` from the identity.
    pub unitarity: f64,
    /// Allowed max-entry deviation of `h - h†` from zero.
    pub hermiticity: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    norm: 1e-9,
    unitarity: 1e-10,
    hermiticity: 1e-12,
};

/// Default cap on register size for annealing runs.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Absolute ceiling for any allocated state vector.
pub const HARD_MAX_QUBITS: usize = 30;

/// Largest arity for which a local operator is stored as a dense matrix.
pub const MAX_LOCAL_QUBITS: usize = 6;

/// Bit mask of qubit `q` in an `n`-qubit register.
#[inline]
pub(crate) fn qubit_mask(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Parses a `0`/`1` literal into bits, qubit 0 first.
pub fn parse_bits(s: &str) -> crate::Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(crate::Error::InvalidArgument(format!(
                "bitstring `{s}` contains `{other}`"
            ))),
        })
        .collect()
}

/// Formats bits as a `0`/`1` literal.
pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Basis index of `bits` (bits[0] most significant).
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Inverse of [`bits_to_index`] for a fixed width.
pub fn index_to_bits(index: usize, width: usize) -> Vec<bool> {
    (0..width).map(|q| (index >> (width - 1 - q)) & 1 == 1).collect()
}
