//! Interaction graphs, interaction sets, datasets and Hamiltonian assembly.

mod classifier;
mod dataset;
mod graph;
mod interactions;
mod layout;

pub use classifier::{assemble_hamiltonian, CoefficientEntry, TrainedClassifier, WeightRange};
pub use dataset::{data_projector, BitString, LabeledDataset, Side};
pub use graph::{presets, Edge, InteractionGraph, Role, Vertex};
pub use interactions::{builtin_interaction_set, InteractionSet, SetName, TermTemplate};
pub use layout::{build_training_layout, qudit_width, Grouping, LayoutMode, TrainingLayout};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::tensor::LocalOperator;
use crate::Result;

/// Where a trainable term sits in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Site {
    /// Term `term` of the set attached to edge `edge`.
    Edge { edge: usize, term: usize },
    /// Single-qubit field `term` on vertex `vertex` (Ising).
    Vertex { vertex: usize, term: usize },
}

/// One trainable placement of an interaction on system qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct TermInstance {
    pub site: Site,
    pub set: SetName,
    pub label: String,
    pub operator: LocalOperator,
}

/// A graph together with its expanded list of term instances.
///
/// Instances are ordered edge by edge (each edge's set in template order),
/// followed by vertex fields in vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    graph: InteractionGraph,
    sets: BTreeMap<SetName, InteractionSet>,
    instances: Vec<TermInstance>,
}

impl Model {
    pub fn new(graph: InteractionGraph) -> Result<Self> {
        let mut sets = BTreeMap::new();
        for e in graph.edges() {
            sets.entry(e.set)
                .or_insert_with(|| builtin_interaction_set(e.set, graph.seed()));
        }
        let mut instances = Vec::new();
        let mut fields: BTreeMap<usize, SetName> = BTreeMap::new();
        for (k, e) in graph.edges().iter().enumerate() {
            let set = &sets[&e.set];
            for (j, t) in set.edge_terms.iter().enumerate() {
                if t.arity() != e.vertices.len() {
                    return Err(crate::Error::InvalidGraph(format!(
                        "edge {k} has {} vertices but {} terms act on {}",
                        e.vertices.len(),
                        e.set,
                        t.arity()
                    )));
                }
                instances.push(TermInstance {
                    site: Site::Edge { edge: k, term: j },
                    set: e.set,
                    label: t.label.clone(),
                    operator: LocalOperator::hermitian(t.matrix.clone(), e.vertices.clone())?,
                });
            }
            if !set.vertex_terms.is_empty() {
                for &v in &e.vertices {
                    fields.entry(v).or_insert(e.set);
                }
            }
        }
        for (v, name) in fields {
            for (j, t) in sets[&name].vertex_terms.iter().enumerate() {
                instances.push(TermInstance {
                    site: Site::Vertex { vertex: v, term: j },
                    set: name,
                    label: t.label.clone(),
                    operator: LocalOperator::hermitian(t.matrix.clone(), vec![v])?,
                });
            }
        }
        Ok(Self {
            graph,
            sets,
            instances,
        })
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn instances(&self) -> &[TermInstance] {
        &self.instances
    }

    pub fn n_terms(&self) -> usize {
        self.instances.len()
    }

    pub fn interaction_set(&self, name: SetName) -> Option<&InteractionSet> {
        self.sets.get(&name)
    }

    /// Number of system qubits (one per vertex).
    pub fn n_system(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn data_qubits(&self) -> Vec<usize> {
        self.graph.data_vertices()
    }

    pub fn hidden_qubits(&self) -> Vec<usize> {
        self.graph.hidden_vertices()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_counts() {
        let counts: Vec<usize> = SetName::ALL
            .iter()
            .map(|&s| Model::new(presets::edge(s)).unwrap().n_terms())
            .collect();
        assert_eq!(counts, vec![16, 4, 7, 3, 3]);
        let ising = Model::new(presets::path(3, SetName::Ising)).unwrap();
        assert_eq!(ising.n_terms(), 5);
        assert_eq!(ising.instances()[2].site, Site::Vertex { vertex: 0, term: 0 });
    }

    #[test]
    fn operators_sit_on_edge_vertices() {
        let m = Model::new(presets::path(3, SetName::Heis)).unwrap();
        assert_eq!(m.instances()[4].operator.targets(), &[1, 2]);
        assert_eq!(m.instances()[4].site, Site::Edge { edge: 1, term: 1 });
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let g = InteractionGraph::new(
            vec![Vertex {
                id: "a".into(),
                role: Role::Data,
            }],
            vec![Edge {
                vertices: vec![0],
                set: SetName::Proj,
            }],
            0,
        )
        .unwrap();
        assert!(Model::new(g).is_err());
    }
}
