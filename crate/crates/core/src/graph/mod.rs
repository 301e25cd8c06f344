//! Weighted undirected graphs with max-normalized edge weights.
//!
//! Vertices are `0..n`. Every edge is stored once in canonical `(i, j, w)` form
//! with `i < j`, sorted lexicographically by `(i, j)`. The normalized density
//!
//! ```text
//! D = 2 * sum(w_ij) / (n * (n - 1))
//! ```
//!
//! is 1 for the complete unweighted graph and is the key used to match graphs
//! during parameter transfer.

mod generate;
mod planarity;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate_test_suite, random_graph, GraphGenSpec, SuiteOptions};
pub use planarity::is_planar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Simple undirected weighted graph. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphData", into = "GraphData")]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: OnceLock<Vec<Vec<(usize, f64)>>>,
    density: OnceLock<Option<f64>>,
}

/// Serialized form: `{"n": .., "edges": [{"i": .., "j": .., "w": ..}, ..]}`.
#[derive(Serialize, Deserialize)]
struct GraphData {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<GraphData> for WeightedGraph {
    type Error = Error;
    fn try_from(d: GraphData) -> Result<Self> {
        Self::new(d.n, d.edges.into_iter().map(|e| (e.i, e.j, e.w)))
    }
}

impl From<WeightedGraph> for GraphData {
    fn from(g: WeightedGraph) -> Self {
        GraphData {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, w)` triples in any orientation.
    ///
    /// Rejects self-loops, out-of-range endpoints, duplicate pairs and
    /// non-finite weights. Weights are not required to be positive here;
    /// [`normalize_weights`] enforces that.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut canonical = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) has weight {w}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            canonical.push(Edge { i, j, w });
        }
        canonical.sort_by(|x, y| (x.i, x.j).cmp(&(y.i, y.j)));
        if let Some(pair) = canonical
            .windows(2)
            .find(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j))
        {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                pair[0].i, pair[0].j
            )));
        }
        Ok(Self::from_canonical(n, canonical))
    }

    fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        Self {
            n,
            edges,
            adjacency: OnceLock::new(),
            density: OnceLock::new(),
        }
    }

    /// Unit-weight graph on the given vertex pairs.
    pub fn unweighted(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    /// Complete unweighted graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| Edge { i, j, w: 1.0 }))
            .collect();
        Self::from_canonical(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    /// True when every weight lies in `(0, 1]` and the maximum is exactly 1.
    pub fn is_normalized(&self) -> bool {
        self.edges.iter().all(|e| e.w > 0.0 && e.w <= 1.0) && self.max_weight() == Some(1.0)
    }

    /// Neighbour lists `(vertex, weight)`, built on first use.
    pub fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        self.adjacency.get_or_init(|| {
            let mut adj = vec![Vec::new(); self.n];
            for e in &self.edges {
                adj[e.i].push((e.j, e.w));
                adj[e.j].push((e.i, e.w));
            }
            adj
        })
    }

    /// Normalized density, cached. Fails for `n < 2`.
    pub fn density(&self) -> Result<f64> {
        self.density
            .get_or_init(|| {
                (self.n >= 2).then(|| {
                    let pairs = (self.n * (self.n - 1)) as f64;
                    2.0 * self.total_weight() / pairs
                })
            })
            .ok_or_else(|| Error::InvalidGraph(format!("density needs n >= 2, got {}", self.n)))
    }

    /// Same vertex count and edge set with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.edges.iter().map(|e| (e.i, e.j, e.w * factor)),
        )
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "permutation of length {} for n = {}",
                perm.len(),
                self.n
            )));
        }
        Self::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.i], perm[e.j], e.w)),
        )
    }
}

/// Divides every weight by the maximum weight.
pub fn normalize_weights(g: &WeightedGraph) -> Result<WeightedGraph> {
    let max = g
        .max_weight()
        .ok_or_else(|| Error::InvalidGraph("cannot normalize a graph without edges".into()))?;
    if let Some(e) = g.edges.iter().find(|e| e.w <= 0.0) {
        return Err(Error::InvalidGraph(format!(
            "edge ({}, {}) has nonpositive weight {}",
            e.i, e.j, e.w
        )));
    }
    let edges = g
        .edges
        .iter()
        .map(|e| Edge {
            w: if e.w == max { 1.0 } else { e.w / max },
            ..*e
        })
        .collect();
    Ok(WeightedGraph::from_canonical(g.n, edges))
}

pub fn normalized_density(g: &WeightedGraph) -> Result<f64> {
    g.density()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(g: &WeightedGraph) -> Vec<f64> {
        g.edges().iter().map(|e| e.w).collect()
    }

    #[test]
    fn normalize_divides_by_max() {
        let g = WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 4.0)]).unwrap();
        assert_eq!(weights(&normalize_weights(&g).unwrap()), vec![0.5, 1.0]);

        let single = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(normalize_weights(&single).unwrap(), single);

        let line = WeightedGraph::new(4, [(0, 1, 0.8), (1, 2, 0.2), (2, 3, 0.4)]).unwrap();
        assert_eq!(weights(&normalize_weights(&line).unwrap()), vec![1.0, 0.25, 0.5]);
    }

    #[test]
    fn normalize_rejects_empty_and_nonpositive() {
        let empty = WeightedGraph::new(3, []).unwrap();
        assert!(normalize_weights(&empty).is_err());
        let neg = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, -0.5)]).unwrap();
        assert!(normalize_weights(&neg).is_err());
        let zero = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        assert!(normalize_weights(&zero).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(normalized_density(&WeightedGraph::complete(7)).unwrap(), 1.0);
        assert_eq!(normalized_density(&WeightedGraph::complete(10)).unwrap(), 1.0);
        let path = WeightedGraph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        assert!((normalized_density(&path).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let single = WeightedGraph::new(1, []).unwrap();
        assert!(normalized_density(&single).is_err());
    }

    #[test]
    fn construction_canonicalizes_and_validates() {
        let g = WeightedGraph::new(4, [(3, 1, 0.5), (0, 2, 1.0)]).unwrap();
        assert_eq!(
            g.edges(),
            &[Edge { i: 0, j: 2, w: 1.0 }, Edge { i: 1, j: 3, w: 0.5 }]
        );
        assert!(WeightedGraph::new(3, [(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 3, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, f64::NAN)]).is_err());
        assert!(WeightedGraph::new(0, []).is_err());
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = WeightedGraph::new(3, [(0, 1, 0.5), (1, 2, 1.0)]).unwrap();
        let adj = g.adjacency();
        assert_eq!(adj[0], vec![(1, 0.5)]);
        assert_eq!(adj[1], vec![(0, 0.5), (2, 1.0)]);
        assert_eq!(adj[2], vec![(1, 1.0)]);
    }
}
