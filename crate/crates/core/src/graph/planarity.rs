//! Left-right planarity test (Brandes' formulation of de Fraysseix–Rosenstiehl).
//!
//! Runs in linear time. Only the yes/no answer is computed; no embedding or
//! Kuratowski subgraph is extracted, so the `side` bookkeeping of the full
//! algorithm is omitted.

use super::WeightedGraph;

pub fn is_planar(g: &WeightedGraph) -> bool {
    let n = g.n();
    let m = g.m();
    if n < 5 || m < 9 {
        return true;
    }
    if m > 3 * n - 6 {
        return false;
    }
    LrState::new(g).run()
}

#[derive(Debug, Clone, Copy, Default)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy)]
struct ConflictPair {
    id: u64,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState {
    // Undirected adjacency: (neighbour, undirected edge index).
    adj: Vec<Vec<(usize, usize)>>,
    oriented: Vec<bool>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    roots: Vec<usize>,
    // Per oriented edge, indexed by oriented-edge id.
    source: Vec<usize>,
    target: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    reference: Vec<Option<usize>>,
    lowpt_edge: Vec<Option<usize>>,
    stack_bottom: Vec<Option<u64>>,
    out_edges: Vec<Vec<usize>>,
    stack: Vec<ConflictPair>,
    next_pair_id: u64,
}

impl LrState {
    fn new(g: &WeightedGraph) -> Self {
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for (k, e) in g.edges().iter().enumerate() {
            adj[e.i].push((e.j, k));
            adj[e.j].push((e.i, k));
        }
        let m = g.m();
        Self {
            adj,
            oriented: vec![false; m],
            height: vec![None; n],
            parent_edge: vec![None; n],
            roots: Vec::new(),
            source: Vec::with_capacity(m),
            target: Vec::with_capacity(m),
            lowpt: Vec::with_capacity(m),
            lowpt2: Vec::with_capacity(m),
            nesting_depth: Vec::with_capacity(m),
            reference: Vec::with_capacity(m),
            lowpt_edge: Vec::with_capacity(m),
            stack_bottom: Vec::with_capacity(m),
            out_edges: vec![Vec::new(); n],
            stack: Vec::new(),
            next_pair_id: 0,
        }
    }

    fn run(mut self) -> bool {
        for v in 0..self.height.len() {
            if self.height[v].is_none() {
                self.height[v] = Some(0);
                self.roots.push(v);
                self.orient(v);
            }
        }
        for v in 0..self.out_edges.len() {
            let depth = &self.nesting_depth;
            self.out_edges[v].sort_by_key(|&e| depth[e]);
        }
        let roots = std::mem::take(&mut self.roots);
        roots.into_iter().all(|r| self.test(r))
    }

    fn h(&self, v: usize) -> usize {
        self.height[v].expect("height assigned during orientation")
    }

    fn new_oriented_edge(&mut self, v: usize, w: usize) -> usize {
        let id = self.source.len();
        let hv = self.h(v);
        self.source.push(v);
        self.target.push(w);
        self.lowpt.push(hv);
        self.lowpt2.push(hv);
        self.nesting_depth.push(0);
        self.reference.push(None);
        self.lowpt_edge.push(None);
        self.stack_bottom.push(None);
        self.out_edges[v].push(id);
        id
    }

    /// DFS orientation phase: heights, lowpoints and nesting depths.
    fn orient(&mut self, v: usize) {
        let parent = self.parent_edge[v];
        for idx in 0..self.adj[v].len() {
            let (w, undirected) = self.adj[v][idx];
            if self.oriented[undirected] {
                continue;
            }
            self.oriented[undirected] = true;
            let vw = self.new_oriented_edge(v, w);
            match self.height[w] {
                None => {
                    self.parent_edge[w] = Some(vw);
                    self.height[w] = Some(self.h(v) + 1);
                    self.orient(w);
                }
                Some(hw) => self.lowpt[vw] = hw,
            }

            self.nesting_depth[vw] = 2 * self.lowpt[vw];
            if self.lowpt2[vw] < self.h(v) {
                // chordal
                self.nesting_depth[vw] += 1;
            }

            if let Some(e) = parent {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn top_id(&self) -> Option<u64> {
        self.stack.last().map(|p| p.id)
    }

    fn push_pair(&mut self, left: Interval, right: Interval) {
        let id = self.next_pair_id;
        self.next_pair_id += 1;
        self.stack.push(ConflictPair { id, left, right });
    }

    fn conflicting(&self, interval: &Interval, edge: usize) -> bool {
        match interval.high {
            Some(h) if !interval.is_empty() => self.lowpt[h] > self.lowpt[edge],
            _ => false,
        }
    }

    fn lowest(&self, pair: &ConflictPair) -> usize {
        match (pair.left.low, pair.right.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => usize::MAX,
        }
    }

    /// DFS testing phase. Returns false as soon as a conflict is found.
    fn test(&mut self, v: usize) -> bool {
        let parent = self.parent_edge[v];
        let out = self.out_edges[v].clone();
        for (pos, &ei) in out.iter().enumerate() {
            self.stack_bottom[ei] = self.top_id();
            let w = self.target[ei];
            if self.parent_edge[w] == Some(ei) {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                self.push_pair(
                    Interval::default(),
                    Interval {
                        low: Some(ei),
                        high: Some(ei),
                    },
                );
            }

            if self.lowpt[ei] < self.h(v) {
                let Some(e) = parent else { continue };
                if pos == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = parent {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p_left = Interval::default();
        let mut p_right = Interval::default();

        // Merge return edges of ei into the right interval.
        loop {
            let Some(mut q) = self.stack.pop() else { break };
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let q_low = q.right.low.expect("non-empty right interval");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p_right.is_empty() {
                    p_right = q.right;
                } else if let Some(pl) = p_right.low {
                    self.reference[pl] = q.right.high;
                }
                p_right.low = q.right.low;
            } else {
                self.reference[q_low] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }

        // Merge conflicting return edges of earlier siblings into the left interval.
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("checked non-empty");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pl) = p_right.low {
                self.reference[pl] = q.right.high;
            }
            if q.right.low.is_some() {
                p_right.low = q.right.low;
            }
            if p_left.is_empty() {
                p_left = q.left;
            } else if let Some(ll) = p_left.low {
                self.reference[ll] = q.left.high;
            }
            p_left.low = q.left.low;
        }

        if !(p_left.is_empty() && p_right.is_empty()) {
            self.push_pair(p_left, p_right);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.source[e];
        let hu = self.h(u);

        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            self.stack.pop();
        }

        if let Some(mut pair) = self.stack.pop() {
            while let Some(h) = pair.left.high {
                if self.target[h] != u {
                    break;
                }
                pair.left.high = self.reference[h];
            }
            if pair.left.high.is_none() {
                if let Some(low) = pair.left.low {
                    self.reference[low] = pair.right.low;
                    pair.left.low = None;
                }
            }
            while let Some(h) = pair.right.high {
                if self.target[h] != u {
                    break;
                }
                pair.right.high = self.reference[h];
            }
            if pair.right.high.is_none() {
                if let Some(low) = pair.right.low {
                    self.reference[low] = pair.left.low;
                    pair.right.low = None;
                }
            }
            self.stack.push(pair);
        }

        if self.lowpt[e] < hu {
            if let Some(top) = self.stack.last() {
                let hl = top.left.high;
                let hr = top.right.high;
                self.reference[e] = match (hl, hr) {
                    (Some(l), None) => Some(l),
                    (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                    _ => hr,
                };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unweighted(pairs: &[(usize, usize)]) -> WeightedGraph {
        let n = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap() + 1;
        WeightedGraph::unweighted(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn kuratowski_graphs_are_not_planar() {
        assert!(!is_planar(&WeightedGraph::complete(5)));
        let k33: Vec<_> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        assert!(!is_planar(&unweighted(&k33)));
    }

    #[test]
    fn k5_minus_an_edge_is_planar() {
        let g = WeightedGraph::new(
            5,
            WeightedGraph::complete(5)
                .edges()
                .iter()
                .filter(|e| (e.i, e.j) != (0, 1))
                .map(|e| (e.i, e.j, e.w)),
        )
        .unwrap();
        assert!(is_planar(&g));
    }

    #[test]
    fn petersen_graph_is_not_planar() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let pairs: Vec<_> = outer.chain(spokes).chain(inner).collect();
        assert!(!is_planar(&unweighted(&pairs)));
    }

    #[test]
    fn subdivided_k33_without_direct_kuratowski_subgraph() {
        let pairs = [
            (1, 5),
            (1, 6),
            (1, 7),
            (2, 6),
            (2, 3),
            (3, 5),
            (3, 7),
            (4, 5),
            (4, 6),
            (4, 7),
        ];
        assert!(!is_planar(&unweighted(&pairs)));
    }

    #[test]
    fn planar_families() {
        // 3x3 grid
        let grid = [
            (0, 1),
            (1, 2),
            (3, 4),
            (4, 5),
            (6, 7),
            (7, 8),
            (0, 3),
            (3, 6),
            (1, 4),
            (4, 7),
            (2, 5),
            (5, 8),
        ];
        assert!(is_planar(&unweighted(&grid)));
        // wheel W_8
        let wheel: Vec<_> = (1..8)
            .map(|i| (0, i))
            .chain((1..8).map(|i| (i, i % 7 + 1)))
            .collect();
        assert!(is_planar(&unweighted(&wheel)));
        // two disjoint K4s
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let pairs: Vec<_> = k4
            .iter()
            .copied()
            .chain(k4.iter().map(|&(a, b)| (a + 4, b + 4)))
            .collect();
        assert!(is_planar(&unweighted(&pairs)));
    }

    #[test]
    fn goldner_harary_is_planar() {
        let pairs = [
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (1, 7),
            (1, 8),
            (1, 10),
            (1, 11),
            (2, 3),
            (2, 4),
            (2, 6),
            (2, 7),
            (2, 9),
            (2, 10),
            (2, 11),
            (3, 4),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 7),
            (6, 7),
            (7, 8),
            (7, 9),
            (7, 10),
            (8, 10),
            (9, 10),
            (10, 11),
        ];
        assert!(is_planar(&unweighted(&pairs)));
    }

    #[test]
    fn trees_are_planar() {
        for n in 2..=20 {
            // caterpillar-ish tree: vertex v attaches to v / 2
            let pairs: Vec<_> = (1..n).map(|v| (v / 2, v)).collect();
            assert!(is_planar(&WeightedGraph::unweighted(n, pairs).unwrap()));
            let star: Vec<_> = (1..n).map(|v| (0, v)).collect();
            assert!(is_planar(&WeightedGraph::unweighted(n, star).unwrap()));
        }
    }
}
