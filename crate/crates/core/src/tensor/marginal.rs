use serde::{Deserialize, Serialize};

use super::{bits_to_index, format_bits, index_to_bits, parse_bits, StateVector};
use crate::{Error, Result};

/// Probability table over the bitstrings of a kept sub-register.
///
/// Entry `i` belongs to the bitstring whose binary expansion is `i`, with
/// `qubits[0]` as the leftmost character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    qubits: Vec<usize>,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(qubits: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << qubits.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} qubits",
                probs.len(),
                qubits.len()
            )));
        }
        Ok(Self { qubits, probs })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, bits: &[bool]) -> f64 {
        self.probs[bits_to_index(bits)]
    }

    /// Lookup by literal, e.g. `"01"`.
    pub fn entry(&self, literal: &str) -> Result<f64> {
        let bits = parse_bits(literal)?;
        if bits.len() != self.qubits.len() {
            return Err(Error::DimensionMismatch(format!(
                "literal `{literal}` for {} kept qubits",
                self.qubits.len()
            )));
        }
        Ok(self.get(&bits))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `(literal, probability)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        let w = self.qubits.len();
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (format_bits(&index_to_bits(i, w)), p))
    }

    /// Probability that qubit `qubits[pos]` reads 1.
    pub fn bit_marginal(&self, pos: usize) -> f64 {
        let w = self.qubits.len();
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> (w - 1 - pos)) & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Marginal distribution of `keep` in the computational basis: the
/// probability of each kept bitstring summed over the discarded qubits.
pub fn data_marginal(state: &StateVector, keep: &[usize]) -> Result<Distribution> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("empty keep set".into()));
    }
    state.check_qubits(keep.iter().copied())?;
    for (i, q) in keep.iter().enumerate() {
        if keep[..i].contains(q) {
            return Err(Error::InvalidArgument(format!("qubit {q} kept twice")));
        }
    }
    let n = state.n_qubits();
    let w = keep.len();
    let mut probs = vec![0.0; 1 << w];
    for (idx, a) in state.amplitudes().iter().enumerate() {
        let key = keep
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1));
        probs[key] += a.norm_sqr();
    }
    Distribution::new(keep.to_vec(), probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_state_marginal() {
        let s = StateVector::basis(&parse_bits("01").unwrap())
            .unwrap()
            .tensor(&StateVector::uniform(1).unwrap())
            .unwrap();
        let d = data_marginal(&s, &[0, 1]).unwrap();
        assert!((d.entry("01").unwrap() - 1.0).abs() < 1e-12);
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_marginal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(vec![
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
        ])
        .unwrap();
        let d = data_marginal(&s, &[1]).unwrap();
        assert!((d.entry("0").unwrap() - 0.5).abs() < 1e-12);
        assert!((d.entry("1").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_keep_rejected() {
        let s = StateVector::uniform(2).unwrap();
        assert!(data_marginal(&s, &[]).is_err());
    }

    /// Partial trace of the dense density matrix, kept qubits permuted to the
    /// front, then the diagonal.
    #[test]
    fn matches_dense_partial_trace() {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateVector::normalized(
            (0..1 << n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let keep = [4usize, 1, 2];
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let order: Vec<usize> = keep.iter().chain(rest.iter()).copied().collect();
        let dim = 1 << n;
        let v = s.amplitudes();
        let permuted: Vec<Complex64> = (0..dim)
            .map(|j| {
                // j is an index in `order` layout; recover natural index.
                let mut idx = 0;
                for (pos, &q) in order.iter().enumerate() {
                    if (j >> (n - 1 - pos)) & 1 == 1 {
                        idx |= 1 << (n - 1 - q);
                    }
                }
                v[idx]
            })
            .collect();
        let psi = nalgebra::DVector::from_vec(permuted);
        let rho: DMatrix<Complex64> = &psi * psi.adjoint();
        let kd = 1 << keep.len();
        let rd = dim / kd;
        let d = data_marginal(&s, &keep).unwrap();
        for a in 0..kd {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..rd {
                acc += rho[(a * rd + b, a * rd + b)];
            }
            assert!((acc.re - d.probs()[a]).abs() < 1e-10);
        }
    }
}
