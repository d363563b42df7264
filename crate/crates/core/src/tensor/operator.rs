use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{MAX_LOCAL_QUBITS, TOLERANCES};
use crate::{Error, Result};

/// A dense operator on a small ordered set of qubits.
///
/// `targets[0]` is the most significant factor of the matrix, matching the
/// usual Kronecker-product ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    matrix: DMatrix<Complex64>,
    targets: Vec<usize>,
    hermitian: bool,
}

impl LocalOperator {
    /// Builds a Hermitian operator, rejecting matrices that are not Hermitian
    /// within the library tolerance.
    pub fn hermitian(matrix: DMatrix<Complex64>, targets: Vec<usize>) -> Result<Self> {
        check_shape(&matrix, &targets)?;
        let dev = hermiticity_defect(&matrix);
        if dev > TOLERANCES.hermiticity {
            return Err(Error::InvalidOperator(format!(
                "matrix deviates from its adjoint by {dev:e}"
            )));
        }
        Ok(Self {
            matrix,
            targets,
            hermitian: true,
        })
    }

    /// Builds an operator without any Hermiticity claim (e.g. a gate).
    pub fn general(matrix: DMatrix<Complex64>, targets: Vec<usize>) -> Result<Self> {
        check_shape(&matrix, &targets)?;
        Ok(Self {
            matrix,
            targets,
            hermitian: false,
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Same matrix placed on different qubits.
    pub fn on(&self, targets: Vec<usize>) -> Result<Self> {
        check_shape(&self.matrix, &targets)?;
        Ok(Self {
            matrix: self.matrix.clone(),
            targets,
            hermitian: self.hermitian,
        })
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.matrix.nrows();
        (0..d).all(|r| (0..d).all(|c| r == c || self.matrix[(r, c)].norm() == 0.0))
    }

    /// Max-entry deviation of `u u†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = &self.matrix * self.matrix.adjoint();
        max_identity_defect(&prod)
    }

    /// Spectral norm of a Hermitian operator (largest |eigenvalue|).
    pub fn spectral_norm(&self) -> Result<f64> {
        if !self.hermitian {
            return Err(Error::InvalidOperator(
                "spectral norm requested for a non-Hermitian operator".into(),
            ));
        }
        let eig = HermitianEigen::new(&self.matrix);
        Ok(eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

fn check_shape(matrix: &DMatrix<Complex64>, targets: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::InvalidOperator("matrix is not square".into()));
    }
    if targets.len() > MAX_LOCAL_QUBITS {
        return Err(Error::InvalidOperator(format!(
            "{} targets exceed the local-operator limit of {MAX_LOCAL_QUBITS}",
            targets.len()
        )));
    }
    if matrix.nrows() != 1 << targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on {} qubits",
            matrix.nrows(),
            matrix.ncols(),
            targets.len()
        )));
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(Error::InvalidOperator(format!("target {t} repeated")));
        }
    }
    Ok(())
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn max_identity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            let id = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, c)] - Complex64::new(id, 0.0)).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, cached so that `exp(-iθh)` can
/// be rebuilt cheaply for many angles.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn new(m: &DMatrix<Complex64>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Self { values, vectors }
    }

    /// `exp(-i θ h)`.
    pub fn exp_i(&self, theta: f64) -> DMatrix<Complex64> {
        let d = self.values.len();
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -theta * l))
            .collect();
        let mut scaled = self.vectors.clone();
        for c in 0..d {
            for r in 0..d {
                scaled[(r, c)] *= phases[c];
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `u = exp(-i θ h)` for a Hermitian local operator, via eigendecomposition.
pub fn matrix_exp_hermitian(h: &LocalOperator, theta: f64) -> Result<LocalOperator> {
    if !h.is_hermitian() {
        return Err(Error::InvalidOperator(
            "matrix exponential needs a Hermitian operator".into(),
        ));
    }
    let u = HermitianEigen::new(h.matrix()).exp_i(theta);
    LocalOperator::general(u, h.targets().to_vec())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Single-qubit Pauli matrices.
pub mod pauli {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn i() -> DMatrix<Complex64> {
        DMatrix::identity(2, 2)
    }

    pub fn x() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn y() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn z() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    /// `|b⟩⟨b|` for a single qubit.
    pub fn projector(b: bool) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(2, 2);
        m[(b as usize, b as usize)] = c(1., 0.);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_hermitian(d: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + a.adjoint()).map(|z| z * 0.5)
    }

    /// Truncated power series for exp(-iθh), independent of the eigensolver.
    fn exp_series(h: &DMatrix<Complex64>, theta: f64, terms: usize) -> DMatrix<Complex64> {
        let d = h.nrows();
        let a = h.map(|z| z * Complex64::new(0.0, -theta));
        let mut sum = DMatrix::<Complex64>::identity(d, d);
        let mut term = DMatrix::<Complex64>::identity(d, d);
        for k in 1..terms {
            term = (&term * &a).map(|z| z / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_matrix_exponentiates_to_identity() {
        let h = LocalOperator::hermitian(DMatrix::zeros(4, 4), vec![0, 1]).unwrap();
        let u = matrix_exp_hermitian(&h, 1.7).unwrap();
        assert!(max_identity_defect(u.matrix()) < 1e-14);
    }

    #[test]
    fn pauli_z_quarter_turn() {
        let h = LocalOperator::hermitian(pauli::z(), vec![0]).unwrap();
        let u = matrix_exp_hermitian(&h, PI / 2.0).unwrap();
        let m = u.matrix();
        assert!((m[(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((m[(1, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12 && m[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn random_hermitian_matches_power_series() {
        for seed in 0..5 {
            let m = random_hermitian(4, seed);
            let h = LocalOperator::hermitian(m.clone(), vec![0, 1]).unwrap();
            let u = matrix_exp_hermitian(&h, 0.3).unwrap();
            let reference = exp_series(&m, 0.3, 40);
            let diff = (u.matrix() - reference).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            assert!(diff < 1e-9, "seed {seed}: {diff}");
            assert!(u.unitarity_defect() < TOLERANCES.unitarity);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0., 0.),
                Complex64::new(1., 0.),
                Complex64::new(0., 0.),
                Complex64::new(0., 0.),
            ],
        );
        assert!(matches!(
            LocalOperator::hermitian(m.clone(), vec![0]),
            Err(Error::InvalidOperator(_))
        ));
        let g = LocalOperator::general(m, vec![0]).unwrap();
        assert!(matrix_exp_hermitian(&g, 1.0).is_err());
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            LocalOperator::hermitian(pauli::x(), vec![0, 1]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(LocalOperator::hermitian(kron(&pauli::x(), &pauli::x()), vec![1, 1]).is_err());
    }

    #[test]
    fn spectral_norm_of_pauli_product() {
        let h = LocalOperator::hermitian(kron(&pauli::y(), &pauli::z()), vec![0, 1]).unwrap();
        assert!((h.spectral_norm().unwrap() - 1.0).abs() < 1e-12);
    }
}
