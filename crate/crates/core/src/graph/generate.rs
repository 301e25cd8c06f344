//! Random instance generation.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_planar, normalize_weights, Edge, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphGenSpec {
    pub n: usize,
    /// Probability that each potential edge is removed.
    pub zero_probability: f64,
    pub weighted: bool,
    pub rng_seed: u64,
}

impl GraphGenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("graph size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.zero_probability) {
            return Err(Error::InvalidInput(format!(
                "zero_probability {} outside [0, 1]",
                self.zero_probability
            )));
        }
        Ok(())
    }
}

/// Draws a random symmetric adjacency matrix and returns it as a normalized graph.
///
/// Every vertex pair `i < j` is visited in lexicographic order; for each one a
/// weight (uniform on `(0, 1]`, or 1 when unweighted) and a removal coin are
/// drawn. The result may have no edges when `zero_probability` is high.
pub fn random_graph(spec: &GraphGenSpec) -> Result<WeightedGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            let w = if spec.weighted {
                1.0 - rng.random::<f64>()
            } else {
                1.0
            };
            let removed = rng.random::<f64>() < spec.zero_probability;
            if !removed {
                edges.push(Edge { i, j, w });
            }
        }
    }
    let g = WeightedGraph::from_canonical(spec.n, edges);
    if g.m() == 0 {
        Ok(g)
    } else {
        normalize_weights(&g)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Candidates drawn per requested graph.
    pub oversample: usize,
    /// Lower bound on the candidate pool.
    pub min_candidates: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            oversample: 100,
            min_candidates: 1000,
        }
    }
}

/// Oversamples random graphs, keeps the non-planar ones and picks `count`
/// of them with densities spread evenly over the range the survivors cover.
///
/// Each candidate draws its own removal probability uniformly from `[0, 1)`,
/// so the pool sweeps sparsity. The survivors' density range is cut into
/// `count` equal bins; each non-empty bin contributes the survivor nearest its
/// centre, and any empty bins are then filled with the unused survivor nearest
/// their centre. The result is sorted by density.
pub fn generate_test_suite(
    count: usize,
    n: usize,
    weighted: bool,
    rng_seed: u64,
    options: SuiteOptions,
) -> Result<Vec<WeightedGraph>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let tried = (count * options.oversample).max(options.min_candidates);
    let mut master = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut survivors: Vec<(WeightedGraph, f64)> = Vec::new();
    for _ in 0..tried {
        let spec = GraphGenSpec {
            n,
            zero_probability: master.random::<f64>(),
            weighted,
            rng_seed: master.next_u64(),
        };
        let g = random_graph(&spec)?;
        if g.m() == 0 || is_planar(&g) {
            continue;
        }
        let d = g.density()?;
        survivors.push((g, d));
    }
    if survivors.len() < count {
        return Err(Error::Shortfall {
            wanted: count,
            found: survivors.len(),
            tried,
        });
    }

    let picks = spread_by_density(&survivors.iter().map(|s| s.1).collect::<Vec<_>>(), count);
    let mut chosen: Vec<(WeightedGraph, f64)> = picks.into_iter().map(|k| survivors[k].clone()).collect();
    chosen.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(chosen.into_iter().map(|(g, _)| g).collect())
}

/// Indices of `count` entries of `densities` spread evenly over their range.
/// Requires `densities.len() >= count`.
fn spread_by_density(densities: &[f64], count: usize) -> Vec<usize> {
    let lo = densities.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = densities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / count as f64;
    let center = |b: usize| lo + (b as f64 + 0.5) * width;
    let bin_of = |d: f64| {
        if width > 0.0 {
            (((d - lo) / width) as usize).min(count - 1)
        } else {
            0
        }
    };

    let mut used = vec![false; densities.len()];
    let mut filled: Vec<Option<usize>> = vec![None; count];
    for (k, &d) in densities.iter().enumerate() {
        let b = bin_of(d);
        let better = match filled[b] {
            None => true,
            Some(cur) => (d - center(b)).abs() < (densities[cur] - center(b)).abs(),
        };
        if better {
            filled[b] = Some(k);
        }
    }
    for k in filled.iter().flatten() {
        used[*k] = true;
    }
    for b in 0..count {
        if filled[b].is_some() {
            continue;
        }
        let c = center(b);
        let pick = (0..densities.len())
            .filter(|&k| !used[k])
            .min_by(|&x, &y| {
                (densities[x] - c)
                    .abs()
                    .total_cmp(&(densities[y] - c).abs())
                    .then(x.cmp(&y))
            })
            .expect("enough survivors");
        used[pick] = true;
        filled[b] = Some(pick);
    }
    filled.into_iter().flatten().collect()
}
