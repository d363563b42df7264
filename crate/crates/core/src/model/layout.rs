use serde::{Deserialize, Serialize};

use super::{Model, Site};
use crate::tensor::{Term, WeightedTermList, HARD_MAX_QUBITS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutMode {
    /// One control qubit per term instance.
    PerTerm,
    /// Each group of `d` terms shares a `⌈log2(d+1)⌉`-qubit control register.
    Qudit,
}

/// How term instances are partitioned into qudit groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    /// Every instance in one group.
    Global,
    /// One group per edge; vertex fields form one group per vertex.
    PerEdge,
    /// Consecutive runs of `k` instances (the last run may be shorter).
    Chunks(usize),
    /// Consecutive runs of the given sizes, which must add up to the term count.
    Sizes(Vec<usize>),
    /// Explicit partition by instance index.
    Explicit(Vec<Vec<usize>>),
}

impl std::str::FromStr for LayoutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "per-term" | "perterm" | "qubit" => Ok(Self::PerTerm),
            "qudit" => Ok(Self::Qudit),
            _ => Err(Error::InvalidArgument(format!("unknown layout mode `{s}` (per-term, qudit)"))),
        }
    }
}

/// `all`, `edge`, `chunks:K`, `sizes:A,B,..` or `groups:0,1;2,3`.
impl std::str::FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse grouping `{s}`"));
        let nums = |t: &str| -> Result<Vec<usize>> {
            t.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
        };
        let lower = s.trim().to_ascii_lowercase();
        match lower.split_once(':') {
            None => match lower.as_str() {
                "all" | "global" => Ok(Self::Global),
                "edge" | "per-edge" => Ok(Self::PerEdge),
                _ => Err(bad()),
            },
            Some(("chunks", k)) => Ok(Self::Chunks(k.trim().parse().map_err(|_| bad())?)),
            Some(("sizes", v)) => Ok(Self::Sizes(nums(v)?)),
            Some(("groups", v)) => Ok(Self::Explicit(v.split(';').map(nums).collect::<Result<_>>()?)),
            _ => Err(bad()),
        }
    }
}

impl Grouping {
    fn partition(&self, model: &Model) -> Result<Vec<Vec<usize>>> {
        let n = model.n_terms();
        let runs = |sizes: &[usize]| -> Result<Vec<Vec<usize>>> {
            if sizes.iter().sum::<usize>() != n || sizes.contains(&0) {
                return Err(Error::InvalidLayout(format!(
                    "group sizes {sizes:?} do not partition {n} terms"
                )));
            }
            let mut start = 0;
            Ok(sizes
                .iter()
                .map(|&s| {
                    start += s;
                    (start - s..start).collect()
                })
                .collect())
        };
        match self {
            Grouping::Global => Ok(vec![(0..n).collect()]),
            Grouping::PerEdge => {
                let mut groups: Vec<(Site, Vec<usize>)> = Vec::new();
                for (i, inst) in model.instances().iter().enumerate() {
                    let key = match inst.site {
                        Site::Edge { edge, .. } => Site::Edge { edge, term: 0 },
                        Site::Vertex { vertex, .. } => Site::Vertex { vertex, term: 0 },
                    };
                    match groups.iter_mut().find(|(k, _)| *k == key) {
                        Some((_, g)) => g.push(i),
                        None => groups.push((key, vec![i])),
                    }
                }
                Ok(groups.into_iter().map(|(_, g)| g).collect())
            }
            Grouping::Chunks(k) => {
                if *k == 0 {
                    return Err(Error::InvalidLayout("chunk size 0".into()));
                }
                let mut sizes = vec![*k; n / k];
                if n % k != 0 {
                    sizes.push(n % k);
                }
                runs(&sizes)
            }
            Grouping::Sizes(sizes) => runs(sizes),
            Grouping::Explicit(groups) => {
                let mut seen = vec![false; n];
                for g in groups {
                    if g.is_empty() {
                        return Err(Error::InvalidLayout("empty group".into()));
                    }
                    for &i in g {
                        if i >= n || seen[i] {
                            return Err(Error::InvalidLayout(format!(
                                "term {i} missing from the model or listed twice"
                            )));
                        }
                        seen[i] = true;
                    }
                }
                if let Some(i) = seen.iter().position(|s| !s) {
                    return Err(Error::InvalidLayout(format!("term {i} is in no group")));
                }
                Ok(groups.clone())
            }
        }
    }
}

/// Control qubits needed to select one of `d` terms or none.
pub fn qudit_width(d: usize) -> usize {
    (usize::BITS - d.leading_zeros()) as usize
}

/// Assignment of term instances to control-register patterns.
///
/// System qubits are `0..n_system`; control qubits follow in group order.
/// In qudit mode term `j` of a group is selected by the pattern encoding
/// `j + 1` (most significant bit first); pattern 0 and any unused patterns
/// select nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLayout {
    pub mode: LayoutMode,
    pub groups: Vec<Vec<usize>>,
    /// Control qubits of each group.
    pub group_qubits: Vec<Vec<usize>>,
    pub n_system: usize,
    pub n_terms: usize,
    /// Scale of the data projector, `-δ Π`.
    pub delta: f64,
}

/// Builds the control-register map. `grouping` is ignored in per-term mode.
pub fn build_training_layout(
    model: &Model,
    mode: LayoutMode,
    grouping: &Grouping,
    delta: f64,
) -> Result<TrainingLayout> {
    if !(delta.is_finite() && delta >= 1.0) {
        return Err(Error::InvalidLayout(format!("δ = {delta} must be at least 1")));
    }
    let n_terms = model.n_terms();
    let groups = match mode {
        LayoutMode::PerTerm => (0..n_terms).map(|i| vec![i]).collect(),
        LayoutMode::Qudit => grouping.partition(model)?,
    };
    let mut next = model.n_system();
    let mut group_qubits = Vec::with_capacity(groups.len());
    for g in &groups {
        let w = qudit_width(g.len());
        if w > HARD_MAX_QUBITS {
            return Err(Error::QubitCap {
                requested: w,
                cap: HARD_MAX_QUBITS,
            });
        }
        group_qubits.push((next..next + w).collect());
        next += w;
    }
    Ok(TrainingLayout {
        mode,
        groups,
        group_qubits,
        n_system: model.n_system(),
        n_terms,
        delta,
    })
}

impl TrainingLayout {
    pub fn n_control(&self) -> usize {
        self.group_qubits.iter().map(|g| g.len()).sum()
    }

    /// Total register size `N`.
    pub fn n_qubits(&self) -> usize {
        self.n_system + self.n_control()
    }

    /// Register size of the uncompressed per-term layout.
    pub fn per_term_qubits(&self) -> usize {
        self.n_system + self.n_terms
    }

    pub fn control_qubits(&self) -> Vec<usize> {
        self.group_qubits.iter().flatten().copied().collect()
    }

    /// Group index and position within the group of a term instance.
    pub fn locate(&self, term: usize) -> Option<(usize, usize)> {
        self.groups.iter().enumerate().find_map(|(g, members)| {
            members.iter().position(|&t| t == term).map(|j| (g, j))
        })
    }

    /// Control pattern selecting `term`.
    pub fn pattern(&self, term: usize) -> Option<Vec<(usize, bool)>> {
        let (g, j) = self.locate(term)?;
        let qubits = &self.group_qubits[g];
        let w = qubits.len();
        Some(
            qubits
                .iter()
                .enumerate()
                .map(|(b, &q)| (q, ((j + 1) >> (w - 1 - b)) & 1 == 1))
                .collect(),
        )
    }

    /// Terms switched on by the control-register value `bits` (ordered like
    /// [`control_qubits`](Self::control_qubits)).
    pub fn active_terms(&self, bits: &[bool]) -> Vec<usize> {
        let mut active = Vec::new();
        let mut offset = 0;
        for (g, qubits) in self.group_qubits.iter().enumerate() {
            let w = qubits.len();
            let v = bits[offset..offset + w]
                .iter()
                .fold(0usize, |a, &b| (a << 1) | b as usize);
            offset += w;
            if v >= 1 && v <= self.groups[g].len() {
                active.push(self.groups[g][v - 1]);
            }
        }
        active.sort_unstable();
        active
    }

    /// `H_c = Σ_i |c_i⟩⟨c_i| ⊗ h_i` with unit coefficients.
    pub fn control_hamiltonian(&self, model: &Model) -> Result<WeightedTermList> {
        if model.n_terms() != self.n_terms || model.n_system() != self.n_system {
            return Err(Error::InvalidLayout("layout was built for a different model".into()));
        }
        let mut h = WeightedTermList::new();
        for (i, inst) in model.instances().iter().enumerate() {
            let pattern = self.pattern(i).expect("every term has a group");
            h.push(Term::controlled(1.0, pattern, inst.operator.clone()))?;
        }
        Ok(h)
    }
}
