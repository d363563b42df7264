//! Dense exact-diagonalization reference for small registers.
//!
//! Everything here materializes `2^n × 2^n` matrices, so it is meant for
//! verification at a dozen qubits or fewer.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::model::{BitString, LabeledDataset, Side};
use crate::tensor::{Complex64, Distribution, WeightedTermList};
use crate::{Error, Result};

/// Largest register the oracle will materialize.
pub const ORACLE_MAX_QUBITS: usize = 14;

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::QubitCap {
            requested: n,
            cap: ORACLE_MAX_QUBITS,
        });
    }
    Ok(())
}

/// Dense matrix of `h` on `n` qubits, built column by column from each
/// term's local matrix without going through the state-vector kernel.
pub fn dense_matrix(h: &WeightedTermList, n: usize) -> Result<DMatrix<Complex64>> {
    check_cap(n)?;
    if h.min_qubits() > n {
        return Err(Error::DimensionMismatch(format!(
            "terms need {} qubits, register has {n}",
            h.min_qubits()
        )));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    for t in h.terms() {
        let targets = t.targets();
        let k = targets.len();
        let target_mask: usize = targets.iter().map(|&q| 1 << (n - 1 - q)).sum();
        for c in 0..dim {
            if t.controls.iter().any(|&(q, v)| bit(c, q) != v as usize) {
                continue;
            }
            match &t.operator {
                None => m[(c, c)] += Complex64::new(t.coefficient, 0.0),
                Some(op) => {
                    let lc = targets.iter().fold(0, |a, &q| (a << 1) | bit(c, q));
                    for lr in 0..1usize << k {
                        let mut r = c & !target_mask;
                        for (j, &q) in targets.iter().enumerate() {
                            if (lr >> (k - 1 - j)) & 1 == 1 {
                                r |= 1 << (n - 1 - q);
                            }
                        }
                        m[(r, c)] += op.matrix()[(lr, lc)] * t.coefficient;
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Full eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
    /// Eigenvalues within this distance of the minimum form the ground space.
    pub tolerance: f64,
    pub n_qubits: usize,
}

/// Default ground-space tolerance: `1e-7 · (λ_max - λ_min + 1)`.
pub fn default_tolerance(values: &[f64]) -> f64 {
    let lo = values.first().copied().unwrap_or(0.0);
    let hi = values.last().copied().unwrap_or(0.0);
    1e-7 * (hi - lo + 1.0)
}

pub fn spectrum_of_matrix(m: DMatrix<Complex64>, n_qubits: usize) -> Spectrum {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let dim = values.len();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum {
        tolerance: default_tolerance(&values),
        values,
        vectors,
        n_qubits,
    }
}

pub fn exact_spectrum(h: &WeightedTermList, n: usize) -> Result<Spectrum> {
    Ok(spectrum_of_matrix(dense_matrix(h, n)?, n))
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    pub fn ground_dimension(&self) -> usize {
        let e0 = self.values[0];
        self.values.iter().take_while(|&&v| v - e0 <= self.tolerance).count()
    }

    /// Orthonormal basis of the ground space, as columns.
    pub fn ground_vectors(&self) -> DMatrix<Complex64> {
        self.vectors.columns(0, self.ground_dimension()).into_owned()
    }

    /// Orthogonal projector onto the ground space.
    pub fn ground_projector(&self) -> DMatrix<Complex64> {
        let g = self.ground_vectors();
        &g * g.adjoint()
    }

    /// Basis-state probabilities of the uniform mixture over the ground space.
    pub fn ground_mixture_diagonal(&self) -> Vec<f64> {
        let g = self.ground_vectors();
        let k = g.ncols() as f64;
        g.row_iter()
            .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>() / k)
            .collect()
    }

    /// Marginal on `qubits` of the uniform ground-space mixture.
    pub fn ground_distribution(&self, qubits: &[usize]) -> Result<Distribution> {
        let n = self.n_qubits;
        if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::DimensionMismatch(format!("qubit {q} outside {n} qubits")));
        }
        let w = qubits.len();
        let mut probs = vec![0.0; 1 << w];
        for (i, p) in self.ground_mixture_diagonal().into_iter().enumerate() {
            let key = qubits
                .iter()
                .fold(0usize, |a, &q| (a << 1) | ((i >> (n - 1 - q)) & 1));
            probs[key] += p;
        }
        Distribution::new(qubits.to_vec(), probs)
    }

    /// Largest residual `‖Hv - λv‖` over all eigenpairs.
    pub fn max_residual(&self, h: &DMatrix<Complex64>) -> f64 {
        (0..self.values.len())
            .map(|k| {
                let v = self.vectors.column(k);
                (h * v - v * Complex64::new(self.values[k], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Data-register marginal of the uniform mixture over `gs(H)`.
pub fn ground_space_data_marginal(
    h: &WeightedTermList,
    n: usize,
    data_qubits: &[usize],
) -> Result<Distribution> {
    exact_spectrum(h, n)?.ground_distribution(data_qubits)
}

/// Rows of the basis-state indices whose `qubits` read `bits`.
fn matching_indices(n: usize, qubits: &[usize], bits: &[bool]) -> Vec<usize> {
    (0..1usize << n)
        .filter(|&i| {
            qubits
                .iter()
                .zip(bits)
                .all(|(&q, &b)| ((i >> (n - 1 - q)) & 1 == 1) == b)
        })
        .collect()
}

/// Cosines of the principal angles between the column spans of two
/// orthonormal bases, largest first.
pub fn principal_cosines(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Vec<f64> {
    let m = a.adjoint() * b;
    let mut s: Vec<f64> = m.singular_values().iter().map(|&x| x.min(1.0)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Overlap of one datum with the ground space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatumOverlap {
    pub datum: BitString,
    pub label: Side,
    /// `cos²` of the smallest principal angle between `gs(H)` and the
    /// subspace `|l⟩ ⊗ (anything on the other qubits)`. It is 1 exactly when
    /// some ground state has all its weight on `l`.
    pub score: f64,
    /// `⟨l|ρ_data|l⟩` for the uniform ground-space mixture.
    pub mixture_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapScores {
    pub data: Vec<DatumOverlap>,
    pub yes_mean: f64,
    pub no_mean: f64,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Ground-space overlap of every labelled datum, plus per-side means.
pub fn overlap_scores(
    h: &WeightedTermList,
    n: usize,
    data_qubits: &[usize],
    dataset: &LabeledDataset,
) -> Result<OverlapScores> {
    let spectrum = exact_spectrum(h, n)?;
    overlap_scores_from(&spectrum, data_qubits, dataset)
}

pub fn overlap_scores_from(
    spectrum: &Spectrum,
    data_qubits: &[usize],
    dataset: &LabeledDataset,
) -> Result<OverlapScores> {
    dataset.check_width(data_qubits.len())?;
    let n = spectrum.n_qubits;
    let g = spectrum.ground_vectors();
    let marginal = spectrum.ground_distribution(data_qubits)?;
    let data: Vec<DatumOverlap> = dataset
        .records()
        .map(|(l, side)| {
            let rows = matching_indices(n, data_qubits, l.bits());
            let sub = DMatrix::from_fn(rows.len(), g.ncols(), |r, c| g[(rows[r], c)]);
            let sigma = sub.singular_values().iter().fold(0.0f64, |m, &s| m.max(s));
            DatumOverlap {
                datum: l.clone(),
                label: side,
                score: (sigma * sigma).min(1.0),
                mixture_p: marginal.get(l.bits()),
            }
        })
        .collect();
    let side_mean =
        |s: Side| mean(data.iter().filter(|d| d.label == s).map(|d| d.score));
    Ok(OverlapScores {
        yes_mean: side_mean(Side::Yes),
        no_mean: side_mean(Side::No),
        data,
    })
}

/// Sub-block of a dense operator on `n_system + n_control` qubits, with the
/// control register (the trailing qubits) fixed to `control_bits`.
pub fn control_block(m: &DMatrix<Complex64>, n_system: usize, control_bits: &[bool]) -> DMatrix<Complex64> {
    let w = control_bits.len();
    let v = control_bits.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
    let d = 1usize << n_system;
    DMatrix::from_fn(d, d, |r, c| m[((r << w) | v, (c << w) | v)])
}

/// Expectation `⟨ψ|M|ψ⟩` for a dense matrix.
pub fn dense_expectation(m: &DMatrix<Complex64>, psi: &[Complex64]) -> f64 {
    let v = DVector::from_column_slice(psi);
    v.dotc(&(m * &v)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::driver_hamiltonian;
    use crate::model::{data_projector, presets, Model, SetName, TrainedClassifier, WeightRange};
    use crate::tensor::{expectation_and_std, pauli, LocalOperator, StateVector, Term};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h_target() -> WeightedTermList {
        let m = Model::new(presets::edge(SetName::Proj)).unwrap();
        TrainedClassifier::new(m, vec![1.0, 0.0, 0.0, 1.0], WeightRange::new(0.0, 1.0).unwrap())
            .unwrap()
            .hamiltonian()
    }

    #[test]
    fn target_spectrum_and_marginal() {
        let s = exact_spectrum(&h_target(), 2).unwrap();
        for (v, want) in s.values.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((v - want).abs() < 1e-12);
        }
        assert_eq!(s.ground_dimension(), 2);
        let d = s.ground_distribution(&[0, 1]).unwrap();
        assert!((d.entry("01").unwrap() - 0.5).abs() < 1e-12);
        assert!((d.entry("10").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn driver_ground_energy() {
        let s = exact_spectrum(&driver_hamiltonian(3), 3).unwrap();
        assert!((s.ground_energy() + 3.0).abs() < 1e-12);
        assert_eq!(s.ground_dimension(), 1);
    }

    #[test]
    fn zero_hamiltonian_has_uniform_marginal() {
        let d = ground_space_data_marginal(&WeightedTermList::new(), 3, &[0, 2]).unwrap();
        assert!(d.probs().iter().all(|p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn overlap_scores_for_target() {
        let data = LabeledDataset::from_strs(&["01", "10"], &["00", "11"]).unwrap();
        let o = overlap_scores(&h_target(), 2, &[0, 1], &data).unwrap();
        assert!((o.yes_mean - 1.0).abs() < 1e-9);
        assert!(o.no_mean.abs() < 1e-9);
        assert!(o.data.iter().take(2).all(|d| (d.mixture_p - 0.5).abs() < 1e-9));
    }

    #[test]
    fn projector_properties() {
        let data = LabeledDataset::from_strs(&["0110", "1011", "0110", "0001"], &[]).unwrap();
        let pi = data_projector(data.yes(), &[1, 2, 3, 4]).unwrap();
        let m = dense_matrix(&pi, 5).unwrap();
        let diff = (&m * &m - &m).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert!(diff < 1e-10);
        // rank = distinct strings (times the 2 states of the spare qubit)
        let s = spectrum_of_matrix(m, 5);
        let rank = s.values.iter().filter(|v| **v > 0.5).count();
        assert_eq!(rank, 3 * 2);
    }

    #[test]
    fn ground_projector_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut h = WeightedTermList::new();
        for q in 0..4 {
            let a = rng.random_range(-1.0..1.0);
            h.push(Term::new(a, LocalOperator::hermitian(pauli::z(), vec![q]).unwrap())).unwrap();
            h.push(Term::new(0.3, LocalOperator::hermitian(pauli::x(), vec![q]).unwrap())).unwrap();
        }
        let m = dense_matrix(&h, 4).unwrap();
        let s = spectrum_of_matrix(m.clone(), 4);
        assert!(s.max_residual(&m) < 1e-8);
        let p = s.ground_projector();
        let e = (&p * &p - &p).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let hp = &m * &p - &p * Complex64::new(s.ground_energy(), 0.0);
        assert!(e < 1e-10);
        assert!(hp.iter().fold(0.0f64, |a, z| a.max(z.norm())) < 1e-9);
    }

    #[test]
    fn dense_agrees_with_streamed_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..50 {
            let n = 2 + trial % 9;
            let mut h = WeightedTermList::new();
            for _ in 0..4 {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                let p = [pauli::x(), pauli::y(), pauli::z()];
                let m = p[rng.random_range(0..3)].kronecker(&p[rng.random_range(0..3)]);
                h.push(Term::new(rng.random_range(-1.0..1.0), LocalOperator::hermitian(m, vec![a, b]).unwrap()))
                    .unwrap();
            }
            h.push(Term::projector(0.7, &[0], &[true])).unwrap();
            let psi = StateVector::normalized(
                (0..1 << n)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let (mean, _) = expectation_and_std(&psi, &h).unwrap();
            let dense = dense_expectation(&dense_matrix(&h, n).unwrap(), psi.amplitudes());
            assert!((mean - dense).abs() < 1e-9, "trial {trial}");
        }
    }

    #[test]
    fn principal_cosines_of_known_planes() {
        let e = |i: usize| DMatrix::from_fn(3, 1, |r, _| Complex64::new((r == i) as u8 as f64, 0.0));
        let a = DMatrix::from_columns(&[e(0).column(0), e(1).column(0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = DMatrix::from_fn(3, 1, |r, _| Complex64::new([s, 0.0, s][r], 0.0));
        let c = principal_cosines(&a, &b);
        assert!((c[0] - s).abs() < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            dense_matrix(&WeightedTermList::new(), 15),
            Err(Error::QubitCap { .. })
        ));
    }
}
