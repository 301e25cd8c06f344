//! Goemans-Williamson baseline: a low-rank vector relaxation of Max-Cut
//! solved by row-wise coordinate ascent, followed by random-hyperplane
//! rounding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::maxcut::{brute_force_maxcut, cut_value, CutAssignment};
use crate::sub_seed;

pub const DEFAULT_CUTS: usize = 10_000;
pub const HISTOGRAM_BINS: usize = 100;
const CUT_CHUNK: usize = 1024;

/// Rank `ceil(sqrt(2n)) + 1` used by [`gw_baseline`].
pub fn default_rank(n: usize) -> usize {
    (2.0 * n as f64).sqrt().ceil() as usize + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitVectorEmbedding {
    pub n: usize,
    pub k: usize,
    /// Row-major `n × k`.
    pub vectors: Vec<f64>,
}

impl UnitVectorEmbedding {
    pub fn new(n: usize, k: usize, vectors: Vec<f64>) -> Result<Self> {
        if vectors.len() != n * k || k == 0 {
            return Err(Error::InvalidInput(format!(
                "embedding needs {n} × {k} entries, got {}",
                vectors.len()
            )));
        }
        let emb = Self { n, k, vectors };
        if let Some(i) = (0..n).find(|&i| (norm(emb.row(i)) - 1.0).abs() > 1e-8) {
            return Err(Error::InvalidInput(format!("embedding row {i} is not a unit vector")));
        }
        Ok(emb)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.k..(i + 1) * self.k]
    }

    /// `Σ w_ij (1 - v_i·v_j) / 2`.
    pub fn objective(&self, g: &WeightedGraph) -> f64 {
        g.edges()
            .iter()
            .map(|e| e.w * (1.0 - dot(self.row(e.i), self.row(e.j))) / 2.0)
            .sum()
    }

    pub fn max_norm_error(&self) -> f64 {
        (0..self.n)
            .map(|i| (norm(self.row(i)) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    pub k: usize,
    /// Maximum sweeps per ascent run.
    pub max_iter: usize,
    /// Relative objective change that ends a run.
    pub tol: f64,
    /// Perturbed restarts after the first run.
    pub restarts: usize,
    pub rng_seed: u64,
}

impl RelaxOptions {
    pub fn for_graph(g: &WeightedGraph) -> Self {
        Self {
            k: default_rank(g.n()),
            max_iter: 10_000,
            tol: 1e-9,
            restarts: 3,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub embedding: UnitVectorEmbedding,
    pub objective: f64,
    /// Objective after each sweep of the run that produced `embedding`.
    pub trace: Vec<f64>,
    pub converged: bool,
}

fn random_unit_rows(n: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n * k).map(|_| rng.sample(StandardNormal)).collect();
    for row in v.chunks_mut(k) {
        let r = norm(row);
        row.iter_mut().for_each(|x| *x /= r);
    }
    v
}

/// Cyclic sweeps setting each row to the normalized negative weighted sum of
/// its neighbours' rows. Each update maximizes the objective over that row,
/// so the objective never decreases.
fn ascend(g: &WeightedGraph, emb: &mut UnitVectorEmbedding, max_iter: usize, tol: f64) -> (Vec<f64>, bool) {
    let adj = g.adjacency();
    let k = emb.k;
    let mut trace = vec![emb.objective(g)];
    let mut target = vec![0.0; k];
    for _ in 0..max_iter {
        for (i, nbrs) in adj.iter().enumerate() {
            target.iter_mut().for_each(|x| *x = 0.0);
            for &(j, w) in nbrs {
                for (t, v) in target.iter_mut().zip(emb.row(j)) {
                    *t -= w * v;
                }
            }
            let r = norm(&target);
            if r > 1e-300 {
                for (dst, t) in emb.vectors[i * k..(i + 1) * k].iter_mut().zip(&target) {
                    *dst = t / r;
                }
            }
        }
        let prev = *trace.last().expect("non-empty trace");
        let cur = emb.objective(g);
        trace.push(cur);
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return (trace, true);
        }
    }
    (trace, false)
}

/// Maximizes `Σ w_ij (1 - v_i·v_j) / 2` over unit rows in `R^k`.
///
/// A run starts from random unit rows and ends when a sweep changes the
/// objective by less than `tol` relative. Each restart perturbs the best
/// embedding so far and ascends again, keeping the better result; restarts
/// stop early once one fails to improve.
pub fn solve_relaxation(g: &WeightedGraph, opts: &RelaxOptions) -> Result<Relaxation> {
    let n = g.n();
    let min_k = (2.0 * n as f64).sqrt().ceil() as usize;
    if opts.k < min_k {
        return Err(Error::InvalidInput(format!(
            "rank {} below ceil(sqrt(2n)) = {min_k}",
            opts.k
        )));
    }
    if g.edges().iter().any(|e| e.w < 0.0) {
        return Err(Error::InvalidGraph("relaxation requires nonnegative weights".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut emb = UnitVectorEmbedding {
        n,
        k: opts.k,
        vectors: random_unit_rows(n, opts.k, &mut rng),
    };
    let (trace, converged) = ascend(g, &mut emb, opts.max_iter, opts.tol);
    let mut best = Relaxation {
        objective: *trace.last().expect("non-empty trace"),
        embedding: emb,
        trace,
        converged,
    };
    for _ in 0..opts.restarts {
        let mut emb = best.embedding.clone();
        for row in emb.vectors.chunks_mut(opts.k) {
            row.iter_mut().for_each(|x| *x += 0.1 * rng.sample::<f64, _>(StandardNormal));
            let r = norm(row);
            row.iter_mut().for_each(|x| *x /= r);
        }
        let (trace, converged) = ascend(g, &mut emb, opts.max_iter, opts.tol);
        let objective = *trace.last().expect("non-empty trace");
        if objective > best.objective * (1.0 + opts.tol) {
            best = Relaxation {
                embedding: emb,
                objective,
                trace,
                converged,
            };
        } else {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioDistribution {
    /// `(cut value, ratio)` per rounding.
    pub samples: Vec<(f64, f64)>,
    pub mean: f64,
    pub max: f64,
    /// Standard error of `mean`.
    pub std_err: f64,
    /// Counts over `[0, 1]` in bins of width 0.01; ratio 1 lands in the last bin.
    pub histogram: Vec<u64>,
}

impl RatioDistribution {
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Self {
        let m = samples.len() as f64;
        let mean = samples.iter().map(|s| s.1).sum::<f64>() / m;
        let max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s.1 - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        let mut histogram = vec![0u64; HISTOGRAM_BINS];
        for s in &samples {
            histogram[ratio_bin(s.1)] += 1;
        }
        Self {
            std_err: (var / m).sqrt(),
            samples,
            mean,
            max,
            histogram,
        }
    }

    pub fn mean_cut(&self) -> f64 {
        self.samples.iter().map(|s| s.0).sum::<f64>() / self.samples.len() as f64
    }
}

/// Histogram bin of a ratio in `[0, 1]` at width 0.01.
pub fn ratio_bin(ratio: f64) -> usize {
    ((ratio * HISTOGRAM_BINS as f64).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

/// Rounds with `n_cuts` standard-normal hyperplane normals `r`, putting
/// vertex `i` on side `sign(v_i · r)` (a zero dot product counts as `+1`).
///
/// Cuts are drawn in chunks of 1024, each chunk from its own stream derived
/// from `rng_seed`, so the output is independent of thread count.
pub fn hyperplane_round(
    emb: &UnitVectorEmbedding,
    g: &WeightedGraph,
    n_cuts: usize,
    rng_seed: u64,
) -> Result<RatioDistribution> {
    let optimum = brute_force_maxcut(g)?.value;
    hyperplane_round_with_optimum(emb, g, n_cuts, rng_seed, optimum)
}

pub fn hyperplane_round_with_optimum(
    emb: &UnitVectorEmbedding,
    g: &WeightedGraph,
    n_cuts: usize,
    rng_seed: u64,
    optimum: f64,
) -> Result<RatioDistribution> {
    if emb.n != g.n() {
        return Err(Error::InvalidInput(format!(
            "embedding has {} rows, graph has {} vertices",
            emb.n,
            g.n()
        )));
    }
    if n_cuts == 0 {
        return Err(Error::InvalidInput("need at least one cut".into()));
    }
    if optimum <= 0.0 {
        return Err(Error::InvalidInput(format!("approximation ratio undefined for optimum {optimum}")));
    }
    let chunks = n_cuts.div_ceil(CUT_CHUNK);
    let samples: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(rng_seed, c as u64));
            let count = CUT_CHUNK.min(n_cuts - c * CUT_CHUNK);
            let mut normal = vec![0.0; emb.k];
            (0..count)
                .map(|_| {
                    normal.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
                    let spins = (0..emb.n)
                        .map(|i| if dot(emb.row(i), &normal) >= 0.0 { 1 } else { -1 })
                        .collect();
                    let cut = cut_value(g, &CutAssignment::new(spins).expect("±1 spins"))
                        .expect("matching length");
                    (cut, cut / optimum)
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    Ok(RatioDistribution::from_samples(samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwResult {
    pub sdp_objective: f64,
    pub optimum: f64,
    pub relaxation_converged: bool,
    pub distribution: RatioDistribution,
}

/// Relaxation at rank `ceil(sqrt(2n)) + 1` followed by `n_cuts` roundings.
pub fn gw_baseline(g: &WeightedGraph, n_cuts: usize, rng_seed: u64) -> Result<GwResult> {
    let opts = RelaxOptions {
        rng_seed: sub_seed(rng_seed, u64::MAX),
        ..RelaxOptions::for_graph(g)
    };
    let relax = solve_relaxation(g, &opts)?;
    let optimum = brute_force_maxcut(g)?.value;
    let distribution = hyperplane_round_with_optimum(&relax.embedding, g, n_cuts, rng_seed, optimum)?;
    Ok(GwResult {
        sdp_objective: relax.objective,
        optimum,
        relaxation_converged: relax.converged,
        distribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_antipodal() {
        let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
        let r = solve_relaxation(&g, &RelaxOptions::for_graph(&g)).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-9);
        let d = dot(r.embedding.row(0), r.embedding.row(1));
        assert!((d + 1.0).abs() < 1e-9);
        let dist = hyperplane_round(&r.embedding, &g, 500, 3).unwrap();
        assert!(dist.samples.iter().all(|s| s.0 == 1.0));
    }

    #[test]
    fn triangle_objective() {
        let g = WeightedGraph::complete(3);
        let r = solve_relaxation(&g, &RelaxOptions::for_graph(&g)).unwrap();
        assert!((r.objective - 2.25).abs() < 1e-7, "{}", r.objective);
    }

    #[test]
    fn trace_is_monotone_and_rows_unit() {
        let g = WeightedGraph::new(
            6,
            [(0, 1, 1.0), (1, 2, 0.4), (2, 3, 0.9), (3, 4, 0.3), (4, 5, 0.8), (0, 5, 0.2), (0, 3, 0.6), (1, 4, 0.5)],
        )
        .unwrap();
        let r = solve_relaxation(&g, &RelaxOptions::for_graph(&g)).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(r.embedding.max_norm_error() < 1e-8);
        assert!(r.objective >= brute_force_maxcut(&g).unwrap().value - 1e-9);
    }

    #[test]
    fn rank_too_small_rejected() {
        let g = WeightedGraph::complete(8);
        let opts = RelaxOptions {
            k: 2,
            ..RelaxOptions::for_graph(&g)
        };
        assert!(solve_relaxation(&g, &opts).is_err());
    }

    #[test]
    fn bipartite_reaches_optimum() {
        // even cycle
        let g = WeightedGraph::unweighted(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        let res = gw_baseline(&g, 10_000, 1).unwrap();
        assert_eq!(res.distribution.max, 1.0);
        assert_eq!(res.distribution.histogram.iter().sum::<u64>(), 10_000);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = WeightedGraph::complete(7);
        let a = gw_baseline(&g, 3000, 17).unwrap();
        let b = gw_baseline(&g, 3000, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn histogram_edges() {
        assert_eq!(ratio_bin(0.0), 0);
        assert_eq!(ratio_bin(0.999), 99);
        assert_eq!(ratio_bin(1.0), 99);
        assert_eq!(ratio_bin(0.5), 50);
    }
}
