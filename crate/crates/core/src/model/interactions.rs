use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::tensor::{kron, pauli, HermitianEigen};
use crate::{Error, Result};

/// Names of the built-in interaction sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetName {
    /// The four two-qubit computational-basis projectors.
    Proj,
    /// All sixteen two-qubit Pauli products, identity included.
    Pauli,
    /// Seven seeded random Hermitian two-qubit matrices.
    Rand,
    /// `x⊗x`, `y⊗y`, `z⊗z`.
    Heis,
    /// `x⊗x` on each edge plus a `z` field on each touched vertex.
    Ising,
}

impl SetName {
    pub const ALL: [SetName; 5] = [
        SetName::Pauli,
        SetName::Proj,
        SetName::Rand,
        SetName::Heis,
        SetName::Ising,
    ];
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SetName::Proj => "Proj",
            SetName::Pauli => "Pauli",
            SetName::Rand => "Rand",
            SetName::Heis => "Heis",
            SetName::Ising => "Ising",
        };
        f.pad(s)
    }
}

impl FromStr for SetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_end_matches('.').to_ascii_lowercase();
        match key.as_str() {
            "proj" | "projector" | "projectors" => Ok(SetName::Proj),
            "pauli" => Ok(SetName::Pauli),
            "rand" | "random" => Ok(SetName::Rand),
            "heis" | "heisenberg" => Ok(SetName::Heis),
            "ising" => Ok(SetName::Ising),
            _ => Err(Error::UnknownInteractionSet(s.to_string())),
        }
    }
}

/// A named local Hermitian matrix, not yet placed on qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct TermTemplate {
    pub label: String,
    pub matrix: DMatrix<Complex64>,
}

impl TermTemplate {
    pub fn arity(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }
}

/// A family of local interactions attached to edges (and, for Ising, to
/// vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSet {
    pub name: SetName,
    /// Arity of the edge terms.
    pub arity: usize,
    pub edge_terms: Vec<TermTemplate>,
    /// Single-qubit terms added once per vertex touched by this set.
    pub vertex_terms: Vec<TermTemplate>,
    /// Seed of the random generator, for sets that use one.
    pub seed: Option<u64>,
}

fn rescale_to_unit_norm(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let norm = HermitianEigen::new(&m)
        .values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if norm == 0.0 {
        m
    } else {
        m.map(|z| z / norm)
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let h = (&a + a.adjoint()).map(|z| z * 0.5);
    // Symmetrize exactly so the Hermiticity check never trips on rounding.
    DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(h[(r, r)].re, 0.0)
        } else if r < c {
            h[(r, c)]
        } else {
            h[(c, r)].conj()
        }
    })
}

fn template(label: impl Into<String>, matrix: DMatrix<Complex64>) -> TermTemplate {
    TermTemplate {
        label: label.into(),
        matrix,
    }
}

/// Builds one of the built-in two-local interaction sets. Every term is
/// rescaled to spectral norm 1 (the zero matrix excepted).
pub fn builtin_interaction_set(name: SetName, seed: u64) -> InteractionSet {
    let paulis = [
        ("I", pauli::i()),
        ("X", pauli::x()),
        ("Y", pauli::y()),
        ("Z", pauli::z()),
    ];
    let mut vertex_terms = Vec::new();
    let mut set_seed = None;
    let edge_terms = match name {
        SetName::Proj => (0..4)
            .map(|i| {
                let mut m = DMatrix::zeros(4, 4);
                m[(i, i)] = Complex64::new(1.0, 0.0);
                template(format!("|{:02b}><{:02b}|", i, i), m)
            })
            .collect(),
        SetName::Pauli => paulis
            .iter()
            .flat_map(|(la, a)| {
                paulis
                    .iter()
                    .map(move |(lb, b)| template(format!("{la}{lb}"), kron(a, b)))
            })
            .collect(),
        SetName::Rand => {
            set_seed = Some(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..7)
                .map(|i| template(format!("R{i}"), random_hermitian(&mut rng, 4)))
                .collect()
        }
        SetName::Heis => paulis[1..]
            .iter()
            .map(|(l, p)| template(format!("{l}{l}"), kron(p, p)))
            .collect(),
        SetName::Ising => {
            vertex_terms.push(template("Z", pauli::z()));
            vec![template("XX", kron(&pauli::x(), &pauli::x()))]
        }
    };
    let normalize = |ts: Vec<TermTemplate>| -> Vec<TermTemplate> {
        ts.into_iter()
            .map(|t| TermTemplate {
                matrix: rescale_to_unit_norm(t.matrix),
                label: t.label,
            })
            .collect()
    };
    InteractionSet {
        name,
        arity: 2,
        edge_terms: normalize(edge_terms),
        vertex_terms: normalize(vertex_terms),
        seed: set_seed,
    }
}
