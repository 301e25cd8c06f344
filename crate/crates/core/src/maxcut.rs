//! Classical Max-Cut cost, exact enumeration and approximation ratios.
//!
//! Assignments use spins `z_i ∈ {+1, -1}`. When an assignment is encoded as a
//! basis index `k`, bit `b` of `k` set means `z_b = -1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest graph the exhaustive search accepts.
pub const BRUTE_FORCE_MAX_N: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct CutAssignment(Vec<i8>);

impl CutAssignment {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(s) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!("spin value {s} is not ±1")));
        }
        Ok(Self(spins))
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        Self(
            (0..n)
                .map(|b| if index >> b & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .fold(0, |acc, (b, _)| acc | 1 << b)
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Bitstring with vertex 0 first; `0` for `z = +1`, `1` for `z = -1`.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&s| if s == 1 { '0' } else { '1' }).collect()
    }
}

impl TryFrom<Vec<i8>> for CutAssignment {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CutAssignment> for Vec<i8> {
    fn from(c: CutAssignment) -> Self {
        c.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCutSolution {
    pub assignment: CutAssignment,
    pub value: f64,
}

/// Weighted cut `sum w_ij (1 - z_i z_j) / 2`.
pub fn cut_value(g: &WeightedGraph, z: &CutAssignment) -> Result<f64> {
    if z.len() != g.n() {
        return Err(Error::InvalidInput(format!(
            "assignment has length {}, graph has {} vertices",
            z.len(),
            g.n()
        )));
    }
    let s = z.spins();
    Ok(g.edges()
        .iter()
        .map(|e| edge_contribution(e.w, s[e.i], s[e.j]))
        .sum())
}

#[inline]
fn edge_contribution(w: f64, zi: i8, zj: i8) -> f64 {
    if zi != zj {
        w
    } else {
        0.0
    }
}

/// Cut value of basis index `k`.
pub fn cut_of_index(g: &WeightedGraph, k: u64) -> f64 {
    g.edges()
        .iter()
        .filter(|e| (k >> e.i ^ k >> e.j) & 1 == 1)
        .map(|e| e.w)
        .sum()
}

/// Exact Max-Cut by exhaustive search.
///
/// Vertex 0 is pinned to `z = +1` (the cut is invariant under a global spin
/// flip), the remaining `n - 1` spins are walked in Gray-code order with an
/// `O(deg)` update per step, and the space is split on its top bits across
/// rayon workers. Among optimal assignments the smallest basis index wins.
pub fn brute_force_maxcut(g: &WeightedGraph) -> Result<MaxCutSolution> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::OverLimit {
            what: "brute-force vertex count",
            got: n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    if n == 1 {
        return Ok(MaxCutSolution {
            assignment: CutAssignment::from_index(0, 1),
            value: 0.0,
        });
    }
    let free = n - 1;
    let split_bits = free.min(6);
    let low_bits = free - split_bits;
    let adj = g.adjacency();
    let total = g.total_weight();
    let scale = total.abs().max(1.0);

    let (_, index) = (0u64..1 << split_bits)
        .into_par_iter()
        .map(|prefix| {
            // Free spins are vertices 1..n; bit (v - 1) of `bits` is vertex v.
            let mut bits: u64 = prefix << low_bits;
            let mut cut = cut_of_index(g, bits << 1);
            let mut best = (cut, bits << 1);
            for step in 1u64..1 << low_bits {
                let flip = step.trailing_zeros() as usize;
                let v = flip + 1;
                let was_set = bits >> flip & 1 == 1;
                // Flipping v toggles every incident edge between cut and uncut.
                let delta: f64 = adj[v]
                    .iter()
                    .map(|&(u, w)| {
                        let u_set = ((bits << 1) >> u) & 1 == 1;
                        if u_set == was_set {
                            w
                        } else {
                            -w
                        }
                    })
                    .sum();
                bits ^= 1 << flip;
                cut += delta;
                let idx = bits << 1;
                if better(cut, idx, best, scale) {
                    best = (cut, idx);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| if better(b.0, b.1, a, scale) { b } else { a },
        );
    let assignment = CutAssignment::from_index(index, n);
    let value = cut_value(g, &assignment)?;
    Ok(MaxCutSolution { assignment, value })
}

/// Ordering used to pick among maxima: larger value, then smaller index.
/// Values within a relative 1e-12 count as ties so the incremental rounding
/// of the Gray-code walk cannot reorder exact ties.
fn better(value: f64, index: u64, best: (f64, u64), scale: f64) -> bool {
    let tie = 1e-12 * scale;
    if value > best.0 + tie {
        true
    } else if value >= best.0 - tie {
        index < best.1
    } else {
        false
    }
}

/// `achieved / optimum` for the graph's exact Max-Cut. Never clamped.
pub fn approximation_ratio(g: &WeightedGraph, achieved: f64) -> Result<f64> {
    let opt = brute_force_maxcut(g)?.value;
    ratio_with_optimum(opt, achieved)
}

pub fn ratio_with_optimum(optimum: f64, achieved: f64) -> Result<f64> {
    if optimum <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "approximation ratio undefined for optimum {optimum}"
        )));
    }
    if achieved < 0.0 {
        return Err(Error::InvalidInput(format!(
            "achieved cut value {achieved} is negative"
        )));
    }
    Ok(achieved / optimum)
}
