use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{bits_to_index, CompiledGate, LocalOperator, HARD_MAX_QUBITS, TOLERANCES};
use crate::{Error, Result};

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n: usize,
}

fn check_size(n: usize) -> Result<()> {
    if n > HARD_MAX_QUBITS {
        return Err(Error::QubitCap {
            requested: n,
            cap: HARD_MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|bits⟩`.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let n = bits.len();
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[bits_to_index(bits)] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, n })
    }

    /// Uniform superposition `2^{-n/2} Σ_s |s⟩`.
    pub fn uniform(n: usize) -> Result<Self> {
        check_size(n)?;
        let a = (1u64 << n) as f64;
        Ok(Self {
            amps: vec![Complex64::new(a.sqrt().recip(), 0.0); 1 << n],
            n,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm one.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{len} amplitudes is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let s = Self { amps, n };
        let dev = (s.norm_sqr() - 1.0).abs();
        if dev > TOLERANCES.norm {
            return Err(Error::Numerical(format!("state norm off by {dev:e}")));
        }
        Ok(s)
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Numerical("cannot normalize the zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        check_size(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self {
            amps,
            n: self.n + other.n,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn check_qubits(&self, qubits: impl IntoIterator<Item = usize>) -> Result<()> {
        for q in qubits {
            if q >= self.n {
                return Err(Error::DimensionMismatch(format!(
                    "qubit {q} outside a {}-qubit register",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Applies a unitary on its own targets.
    pub fn apply_local_unitary(&mut self, u: &LocalOperator) -> Result<()> {
        self.apply_controlled_unitary(&[], u)
    }

    /// Applies `|c⟩⟨c| ⊗ u + (1 - |c⟩⟨c|) ⊗ 1` where `c` is the control pattern.
    pub fn apply_controlled_unitary(
        &mut self,
        controls: &[(usize, bool)],
        u: &LocalOperator,
    ) -> Result<()> {
        self.check_qubits(u.targets().iter().copied())?;
        self.check_qubits(controls.iter().map(|c| c.0))?;
        if controls.iter().any(|(c, _)| u.targets().contains(c)) {
            return Err(Error::InvalidOperator("control overlaps a target".into()));
        }
        let defect = u.unitarity_defect();
        if defect > 1e-9 {
            return Err(Error::InvalidOperator(format!(
                "gate is not unitary (defect {defect:e})"
            )));
        }
        let gate = CompiledGate::new(self.n, controls, u.targets(), u.matrix());
        gate.apply(&mut self.amps);
        Ok(())
    }

    /// Applies a raw matrix on `targets` with no unitarity check.
    pub fn apply_matrix(&mut self, targets: &[usize], m: &DMatrix<Complex64>) -> Result<()> {
        let u = LocalOperator::general(m.clone(), targets.to_vec())?;
        self.check_qubits(targets.iter().copied())?;
        CompiledGate::new(self.n, &[], u.targets(), u.matrix()).apply(&mut self.amps);
        Ok(())
    }
}
