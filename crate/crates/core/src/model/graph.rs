use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SetName;
use crate::{Error, Result};

/// Whether a vertex carries input data or is an auxiliary spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Data,
    Hidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub role: Role,
}

/// A hyperedge over vertex indices with the interaction set it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub vertices: Vec<usize>,
    pub set: SetName,
}

/// Interaction hypergraph. Vertex `i` is qubit `i` of the system register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    seed: u64,
}

/// On-disk form: edges name vertices by id.
#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<Vertex>,
    edges: Vec<EdgeFile>,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeFile {
    vertices: Vec<String>,
    set: String,
}

impl InteractionGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, seed: u64) -> Result<Self> {
        if !vertices.iter().any(|v| v.role == Role::Data) {
            return Err(Error::InvalidGraph("no data vertex".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].iter().any(|w| w.id == v.id) {
                return Err(Error::InvalidGraph(format!("duplicate vertex id `{}`", v.id)));
            }
        }
        for (k, e) in edges.iter().enumerate() {
            if e.vertices.is_empty() {
                return Err(Error::InvalidGraph(format!("edge {k} is empty")));
            }
            for (i, &v) in e.vertices.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(Error::InvalidGraph(format!("edge {k} names vertex {v}")));
                }
                if e.vertices[..i].contains(&v) {
                    return Err(Error::InvalidGraph(format!("edge {k} repeats vertex {v}")));
                }
            }
        }
        let g = Self {
            vertices,
            edges,
            seed,
        };
        if !g.is_connected() {
            log::warn!("interaction graph is not connected");
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn data_vertices(&self) -> Vec<usize> {
        self.by_role(Role::Data)
    }

    pub fn hidden_vertices(&self) -> Vec<usize> {
        self.by_role(Role::Hidden)
    }

    fn by_role(&self, role: Role) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.role == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            for w in e.vertices.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// Same topology with every edge carrying `set`.
    pub fn with_set(&self, set: SetName) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.set = set;
        }
        g
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let index = |id: &str| -> Result<usize> {
            file.vertices
                .iter()
                .position(|v| v.id == id)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex `{id}`")))
        };
        let mut edges = Vec::with_capacity(file.edges.len());
        for e in &file.edges {
            edges.push(Edge {
                vertices: e.vertices.iter().map(|v| index(v)).collect::<Result<_>>()?,
                set: e.set.parse()?,
            });
        }
        Self::new(file.vertices, edges, file.seed)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeFile {
                    vertices: e.vertices.iter().map(|&v| self.vertices[v].id.clone()).collect(),
                    set: e.set.to_string(),
                })
                .collect(),
            seed: self.seed,
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn data_vertices(n: usize) -> Vec<Vertex> {
    (0..n)
        .map(|i| Vertex {
            id: format!("v{i}"),
            role: Role::Data,
        })
        .collect()
}

fn pair(a: usize, b: usize, set: SetName) -> Edge {
    Edge {
        vertices: vec![a, b],
        set,
    }
}

/// Stand-in topologies for the four benchmark graphs. Only their vertex and
/// edge counts are known, so these are simple shapes with those counts;
/// every vertex is a data vertex.
pub mod presets {
    use super::*;

    /// Two vertices, one edge.
    pub fn edge(set: SetName) -> InteractionGraph {
        InteractionGraph::new(data_vertices(2), vec![pair(0, 1, set)], 0).expect("valid preset")
    }

    /// Path on `n` vertices.
    pub fn path(n: usize, set: SetName) -> InteractionGraph {
        let edges = (1..n).map(|i| pair(i - 1, i, set)).collect();
        InteractionGraph::new(data_vertices(n), edges, 0).expect("valid preset")
    }

    /// Eight-cycle with one chord (8 vertices, 9 edges).
    pub fn cycle8_chord(set: SetName) -> InteractionGraph {
        let mut edges: Vec<Edge> = (0..8).map(|i| pair(i, (i + 1) % 8, set)).collect();
        edges.push(pair(0, 4, set));
        InteractionGraph::new(data_vertices(8), edges, 0).expect("valid preset")
    }

    /// Benchmark stand-in by number: 1 edge, 2 path-3, 3 path-4, 4 cycle-8 with chord.
    pub fn benchmark(index: usize, set: SetName) -> Result<InteractionGraph> {
        match index {
            1 => Ok(edge(set)),
            2 => Ok(path(3, set)),
            3 => Ok(path(4, set)),
            4 => Ok(cycle8_chord(set)),
            _ => Err(Error::InvalidGraph(format!("no benchmark graph {index}"))),
        }
    }

    /// Star with `ids.len()` data leaves around one hidden center (the last vertex).
    pub fn star(ids: &[&str], set: SetName) -> InteractionGraph {
        let mut vertices: Vec<Vertex> = ids
            .iter()
            .map(|id| Vertex {
                id: id.to_string(),
                role: Role::Data,
            })
            .collect();
        let center = vertices.len();
        vertices.push(Vertex {
            id: "center".into(),
            role: Role::Hidden,
        });
        let edges = (0..center).map(|i| pair(i, center, set)).collect();
        InteractionGraph::new(vertices, edges, 0).expect("valid preset")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "vertices": [{"id": "a", "role": "data"}, {"id": "h", "role": "hidden"}, {"id": "b", "role": "data"}],
            "edges": [{"vertices": ["a", "h"], "set": "Proj"}, {"vertices": ["h", "b"], "set": "Heis"}],
            "seed": 5
        }"#;
        let g = InteractionGraph::from_json(text).unwrap();
        assert_eq!(g.data_vertices(), vec![0, 2]);
        assert_eq!(g.hidden_vertices(), vec![1]);
        assert_eq!(g.edges()[1].set, SetName::Heis);
        assert_eq!(g.seed(), 5);
        assert_eq!(InteractionGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn rejects_bad_graphs() {
        let hidden_only = vec![Vertex {
            id: "h".into(),
            role: Role::Hidden,
        }];
        assert!(InteractionGraph::new(hidden_only, vec![], 0).is_err());
        let dup = vec![pair(0, 0, SetName::Proj)];
        assert!(InteractionGraph::new(data_vertices(2), dup, 0).is_err());
        let text = r#"{"vertices":[{"id":"a","role":"data"}],"edges":[{"vertices":["a","z"],"set":"Proj"}]}"#;
        assert!(InteractionGraph::from_json(text).is_err());
        let text = r#"{"vertices":[{"id":"a","role":"data"},{"id":"b","role":"data"}],"edges":[{"vertices":["a","b"],"set":"Foo"}]}"#;
        assert!(matches!(
            InteractionGraph::from_json(text),
            Err(Error::UnknownInteractionSet(_))
        ));
    }

    #[test]
    fn disconnected_graph_is_only_a_warning() {
        let g = InteractionGraph::new(data_vertices(3), vec![pair(0, 1, SetName::Proj)], 0).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn preset_sizes() {
        let sizes: Vec<(usize, usize)> = (1..=4)
            .map(|i| {
                let g = presets::benchmark(i, SetName::Proj).unwrap();
                assert!(g.is_connected());
                (g.n_vertices(), g.edges().len())
            })
            .collect();
        assert_eq!(sizes, vec![(2, 1), (3, 2), (4, 3), (8, 9)]);
        let star = presets::star(&["a", "b", "c"], SetName::Proj);
        assert_eq!(star.hidden_vertices(), vec![3]);
        assert_eq!(star.edges().len(), 3);
    }
}
