use num_complex::Complex64;

use super::{CompiledGate, LocalOperator, StateVector};
use crate::{Error, Result};

/// One weighted term `a · (|c⟩⟨c| ⊗ h)`.
///
/// `controls` is a computational-basis pattern on some qubits; an empty
/// pattern means no projector. A missing operator means identity, so a term
/// with controls and no operator is a diagonal basis projector. Rank-1 data
/// projectors are written this way, as a product of 1-local projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub controls: Vec<(usize, bool)>,
    pub operator: Option<LocalOperator>,
}

impl Term {
    pub fn new(coefficient: f64, operator: LocalOperator) -> Self {
        Self {
            coefficient,
            controls: Vec::new(),
            operator: Some(operator),
        }
    }

    /// `a · |bits⟩⟨bits|` on `qubits`.
    pub fn projector(coefficient: f64, qubits: &[usize], bits: &[bool]) -> Self {
        Self {
            coefficient,
            controls: qubits.iter().copied().zip(bits.iter().copied()).collect(),
            operator: None,
        }
    }

    /// `a · (|pattern⟩⟨pattern| ⊗ h)`.
    pub fn controlled(coefficient: f64, controls: Vec<(usize, bool)>, operator: LocalOperator) -> Self {
        Self {
            coefficient,
            controls,
            operator: Some(operator),
        }
    }

    pub fn targets(&self) -> &[usize] {
        self.operator.as_ref().map_or(&[], |o| o.targets())
    }

    /// All qubits the term touches.
    pub fn support(&self) -> Vec<usize> {
        self.controls
            .iter()
            .map(|c| c.0)
            .chain(self.targets().iter().copied())
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !self.coefficient.is_finite() {
            return Err(Error::InvalidOperator("non-finite coefficient".into()));
        }
        if let Some(op) = &self.operator {
            if !op.is_hermitian() {
                return Err(Error::InvalidOperator(
                    "Hamiltonian terms must be Hermitian".into(),
                ));
            }
        }
        let support = self.support();
        for (i, q) in support.iter().enumerate() {
            if support[..i].contains(q) {
                return Err(Error::InvalidOperator(format!("qubit {q} used twice in a term")));
            }
        }
        Ok(())
    }

    pub(crate) fn compile(&self, n: usize) -> CompiledGate {
        match &self.operator {
            Some(op) => CompiledGate::new(n, &self.controls, op.targets(), op.matrix()),
            None => CompiledGate::new(
                n,
                &self.controls,
                &[],
                &nalgebra::DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
            ),
        }
    }
}

/// `H = Σ_i a_i h_i`, kept as a list of local terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedTermList {
    terms: Vec<Term>,
}

impl WeightedTermList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        let mut list = Self::new();
        for t in terms {
            list.push(t)?;
        }
        Ok(list)
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        term.validate()?;
        self.terms.push(term);
        Ok(())
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coefficient: t.coefficient * s,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn extend(&mut self, other: &WeightedTermList) {
        self.terms.extend(other.terms.iter().cloned());
    }

    /// Smallest register that holds every term.
    pub fn min_qubits(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.support())
            .max()
            .map_or(0, |q| q + 1)
    }

    /// `H|ψ⟩`.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        let n = state.n_qubits();
        if self.min_qubits() > n {
            return Err(Error::DimensionMismatch(format!(
                "terms need {} qubits, state has {n}",
                self.min_qubits()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << n];
        for t in &self.terms {
            if t.coefficient != 0.0 {
                t.compile(n).accumulate(t.coefficient, state.amplitudes(), &mut out);
            }
        }
        Ok(out)
    }
}

/// Energy mean `⟨ψ|H|ψ⟩` and standard deviation `sqrt(⟨H²⟩ - ⟨H⟩²)`.
pub fn expectation_and_std(state: &StateVector, h: &WeightedTermList) -> Result<(f64, f64)> {
    let phi = h.apply(state)?;
    let mean: f64 = state
        .amplitudes()
        .iter()
        .zip(&phi)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let second: f64 = phi.iter().map(|p| p.norm_sqr()).sum();
    let var = (second - mean * mean).max(0.0);
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pauli;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StateVector::normalized(
            (0..1 << n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn random_hermitian(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let d = 1 << k;
        let a = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + a.adjoint()).map(|z| z * 0.5)
    }

    /// Dense matrix by direct element formula, independent of the kernel.
    fn dense(h: &WeightedTermList, n: usize) -> DMatrix<Complex64> {
        let dim = 1 << n;
        let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
        let mut m = DMatrix::zeros(dim, dim);
        for t in h.terms() {
            let tg = t.targets();
            for r in 0..dim {
                for c in 0..dim {
                    if t.controls.iter().any(|&(q, v)| bit(r, q) != v as usize || bit(c, q) != v as usize) {
                        continue;
                    }
                    let others_equal = (0..n)
                        .filter(|q| !tg.contains(q))
                        .all(|q| bit(r, q) == bit(c, q));
                    if !others_equal {
                        continue;
                    }
                    let lr = tg.iter().fold(0, |a, &q| (a << 1) | bit(r, q));
                    let lc = tg.iter().fold(0, |a, &q| (a << 1) | bit(c, q));
                    let elem = match &t.operator {
                        Some(op) => op.matrix()[(lr, lc)],
                        None => Complex64::new(1.0, 0.0),
                    };
                    m[(r, c)] += elem * t.coefficient;
                }
            }
        }
        m
    }

    #[test]
    fn eigenstate_has_zero_spread() {
        let h = WeightedTermList::from_terms(vec![
            Term::new(0.7, LocalOperator::hermitian(pauli::z(), vec![0]).unwrap()),
            Term::new(-0.2, LocalOperator::hermitian(pauli::z().kronecker(&pauli::z()), vec![1, 2]).unwrap()),
        ])
        .unwrap();
        let s = StateVector::basis(&[true, false, true]).unwrap();
        let (mean, std) = expectation_and_std(&s, &h).unwrap();
        assert!((mean - (-0.7 + 0.2)).abs() < 1e-12);
        assert!(std < 1e-8);
    }

    #[test]
    fn plus_state_under_z() {
        let h = WeightedTermList::from_terms(vec![Term::new(
            1.0,
            LocalOperator::hermitian(pauli::z(), vec![0]).unwrap(),
        )])
        .unwrap();
        let s = StateVector::uniform(1).unwrap();
        let (mean, std) = expectation_and_std(&s, &h).unwrap();
        assert!(mean.abs() < 1e-12);
        assert!((std - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_terms_match_dense_oracle() {
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = WeightedTermList::from_terms(vec![
            Term::new(0.4, LocalOperator::hermitian(random_hermitian(2, &mut rng), vec![5, 1]).unwrap()),
            Term::controlled(
                -1.1,
                vec![(7, true), (0, false)],
                LocalOperator::hermitian(random_hermitian(1, &mut rng), vec![3]).unwrap(),
            ),
            Term::projector(0.9, &[2, 6, 4], &[true, false, true]),
        ])
        .unwrap();
        let s = random_state(n, 5);
        let (mean, std) = expectation_and_std(&s, &h).unwrap();
        let m = dense(&h, n);
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        let hv = &m * &v;
        let oracle_mean = v.dotc(&hv).re;
        let oracle_sq = hv.dotc(&hv).re;
        assert!((mean - oracle_mean).abs() < 1e-9);
        assert!((std - (oracle_sq - oracle_mean * oracle_mean).max(0.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn register_too_small() {
        let h = WeightedTermList::from_terms(vec![Term::projector(1.0, &[4], &[true])]).unwrap();
        assert!(expectation_and_std(&StateVector::uniform(3).unwrap(), &h).is_err());
    }

    #[test]
    fn overlapping_control_rejected() {
        let t = Term::controlled(
            1.0,
            vec![(0, true)],
            LocalOperator::hermitian(pauli::x(), vec![0]).unwrap(),
        );
        assert!(WeightedTermList::from_terms(vec![t]).is_err());
    }
}
