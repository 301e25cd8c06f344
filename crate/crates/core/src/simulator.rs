//! Noiseless QAOA state-vector simulation for weighted Max-Cut.
//!
//! The circuit starts from `|+>^n` and applies `p` layers, each a diagonal
//! cost phase `exp(-i γ_k H_C)` with `H_C = sum w_ij (I - Z_i Z_j) / 2`
//! followed by the transverse mixer `prod_j R_X(2 β_k)`.
//!
//! Basis index `k` encodes vertex `b` in bit `b`: bit 0 is `z_b = +1`, bit 1
//! is `z_b = -1`. Since `H_C` is diagonal in this basis, the cost layer only
//! multiplies amplitude `k` by `exp(-i γ C(k))`, where `C(k)` is the classical
//! cut of basis state `k`. The product of per-edge `R_ZZ` gates produces the
//! same state up to a global phase.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::maxcut::{cut_of_index, CutAssignment};

/// Default pure-state qubit cap (2^24 amplitudes, 256 MiB).
pub const DEFAULT_QUBIT_CAP: usize = 24;
/// Shot count for campaign-fidelity runs.
pub const CAMPAIGN_SHOTS: u64 = 1 << 19;
/// Shot count for quick runs.
pub const QUICK_SHOTS: u64 = 2048;

// Below this many amplitudes the kernels stay single-threaded.
const PARALLEL_MIN_AMPS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub qubit_cap: usize,
    /// Memory allowed for the precomputed `2^n` cut table.
    pub cut_table_budget_bytes: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            qubit_cap: DEFAULT_QUBIT_CAP,
            cut_table_budget_bytes: 1 << 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct QaoaParams {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl TryFrom<RawParams> for QaoaParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        let params = QaoaParams::new(raw.gamma, raw.beta)?;
        match raw.p {
            Some(p) if p != params.p() => Err(Error::InvalidInput(format!(
                "declared p = {p} but angle vectors have length {}",
                params.p()
            ))),
            _ => Ok(params),
        }
    }
}

impl From<QaoaParams> for RawParams {
    fn from(q: QaoaParams) -> Self {
        RawParams {
            p: Some(q.p()),
            gamma: q.gamma,
            beta: q.beta,
        }
    }
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() || gamma.len() != beta.len() {
            return Err(Error::InvalidInput(format!(
                "need equal, non-zero angle counts (gamma {}, beta {})",
                gamma.len(),
                beta.len()
            )));
        }
        if gamma.iter().chain(&beta).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("angles must be finite".into()));
        }
        Ok(Self { gamma, beta })
    }

    /// Splits `[γ_1..γ_p, β_1..β_p]`.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "flat parameter vector has odd length {}",
                x.len()
            )));
        }
        let p = x.len() / 2;
        Self::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Copy with γ reduced into `[0, 2π)` and β into `[0, π)`.
    ///
    /// For non-integer weights the cost unitary is not 2π-periodic in γ, so
    /// this changes the circuit; it is only a storage convention.
    pub fn canonical(&self) -> Self {
        Self {
            gamma: self.gamma.iter().map(|g| g.rem_euclid(TAU)).collect(),
            beta: self.beta.iter().map(|b| b.rem_euclid(PI)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Computational basis state `|k>`.
    pub fn basis(n: usize, k: u64) -> Result<Self> {
        check_cap(n, DEFAULT_QUBIT_CAP)?;
        if k >> n != 0 {
            return Err(Error::InvalidInput(format!("basis index {k} out of range for n = {n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[k as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("qubit count must be positive".into()));
    }
    if n > cap {
        return Err(Error::OverLimit {
            what: "qubit count",
            got: n,
            limit: cap,
        });
    }
    Ok(())
}

pub fn prepare_plus_state(n: usize) -> Result<StateVector> {
    prepare_plus_state_with_cap(n, DEFAULT_QUBIT_CAP)
}

pub fn prepare_plus_state_with_cap(n: usize, cap: usize) -> Result<StateVector> {
    check_cap(n, cap)?;
    let a = (1u64 << n) as f64;
    let amp = Complex64::new(a.sqrt().recip(), 0.0);
    Ok(StateVector {
        n,
        amps: vec![amp; 1 << n],
    })
}

/// Cut value of every basis state, indexed by basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTable {
    values: Vec<f64>,
    /// Distinct cut values and each index's position among them, kept when
    /// there are few enough levels to make per-level phases cheaper.
    levels: Option<(Vec<f64>, Vec<u32>)>,
}

impl CutTable {
    /// Builds the table in `O(2^n · deg)` by adding one vertex at a time:
    /// setting bit `h` on an index whose bits `>= h` are clear toggles each
    /// edge at `h` between cut and uncut.
    pub fn build(g: &WeightedGraph) -> Self {
        let n = g.n();
        let adj = g.adjacency();
        let mut table = vec![0.0; 1 << n];
        for (h, neighbours) in adj.iter().enumerate() {
            let (lower, upper) = table.split_at_mut(1 << h);
            let upper = &mut upper[..1 << h];
            let fill = |(k, (dst, &base)): (usize, (&mut f64, &f64))| {
                let delta: f64 = neighbours
                    .iter()
                    .map(|&(u, w)| if k >> u & 1 == 0 { w } else { -w })
                    .sum();
                *dst = base + delta;
            };
            if upper.len() >= PARALLEL_MIN_AMPS {
                upper
                    .par_iter_mut()
                    .zip(lower.par_iter())
                    .enumerate()
                    .for_each(fill);
            } else {
                upper.iter_mut().zip(lower.iter()).enumerate().for_each(fill);
            }
        }
        let levels = Self::levels(&table);
        Self { values: table, levels }
    }

    fn levels(values: &[f64]) -> Option<(Vec<f64>, Vec<u32>)> {
        let mut distinct: Vec<f64> = values.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup_by(|a, b| a.to_bits() == b.to_bits());
        if distinct.len() > values.len() / 8 {
            return None;
        }
        let index = values
            .iter()
            .map(|v| distinct.binary_search_by(|d| d.total_cmp(v)).expect("value is present") as u32)
            .collect();
        Some((distinct, index))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Multiplies amplitude `k` by `exp(-i γ C(k))`, computing cuts edge by edge.
pub fn apply_cost_layer(state: &mut StateVector, g: &WeightedGraph, gamma: f64) -> Result<()> {
    check_dims(state, g)?;
    for e in g.edges() {
        apply_edge_phase(state, e.i, e.j, gamma * e.w);
    }
    Ok(())
}

/// Same as [`apply_cost_layer`] using a precomputed cut table.
pub fn apply_cost_layer_table(state: &mut StateVector, table: &CutTable, gamma: f64) -> Result<()> {
    if table.values.len() != state.amps.len() {
        return Err(Error::InvalidInput(format!(
            "cut table has {} entries, state has {}",
            table.values.len(),
            state.amps.len()
        )));
    }
    if let Some((distinct, index)) = &table.levels {
        let phases: Vec<Complex64> = distinct.iter().map(|&c| Complex64::cis(-gamma * c)).collect();
        let kernel = |(a, &l): (&mut Complex64, &u32)| *a *= phases[l as usize];
        if state.amps.len() >= PARALLEL_MIN_AMPS {
            state.amps.par_iter_mut().zip(index.par_iter()).for_each(kernel);
        } else {
            state.amps.iter_mut().zip(index.iter()).for_each(kernel);
        }
        return Ok(());
    }
    let kernel = |(a, &c): (&mut Complex64, &f64)| *a *= Complex64::cis(-gamma * c);
    if state.amps.len() >= PARALLEL_MIN_AMPS {
        state.amps.par_iter_mut().zip(table.values.par_iter()).for_each(kernel);
    } else {
        state.amps.iter_mut().zip(table.values.iter()).for_each(kernel);
    }
    Ok(())
}

/// `exp(-i θ (I - Z_i Z_j) / 2)`: phase `e^{-iθ}` where bits `i` and `j` differ.
pub(crate) fn apply_edge_phase(state: &mut StateVector, i: usize, j: usize, theta: f64) {
    let phase = Complex64::cis(-theta);
    let kernel = |(k, a): (usize, &mut Complex64)| {
        if (k >> i ^ k >> j) & 1 == 1 {
            *a *= phase;
        }
    };
    if state.amps.len() >= PARALLEL_MIN_AMPS {
        state.amps.par_iter_mut().enumerate().for_each(kernel);
    } else {
        state.amps.iter_mut().enumerate().for_each(kernel);
    }
}

/// Applies a 2x2 unitary `[[u00, u01], [u10, u11]]` to `qubit`.
pub(crate) fn apply_single_qubit(state: &mut StateVector, qubit: usize, u: [[Complex64; 2]; 2]) {
    for_each_pair(state, qubit, |a0, a1| {
        let (x0, x1) = (*a0, *a1);
        *a0 = u[0][0] * x0 + u[0][1] * x1;
        *a1 = u[1][0] * x0 + u[1][1] * x1;
    });
}

/// Calls `pair` on every amplitude pair differing only in bit `qubit`.
fn for_each_pair(state: &mut StateVector, qubit: usize, pair: impl Fn(&mut Complex64, &mut Complex64) + Sync) {
    let stride = 1usize << qubit;
    let butterfly = |lo: &mut [Complex64], hi: &mut [Complex64]| {
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            pair(a0, a1);
        }
    };
    if state.amps.len() < PARALLEL_MIN_AMPS {
        for chunk in state.amps.chunks_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            butterfly(lo, hi);
        }
    } else if stride < PARALLEL_MIN_AMPS {
        state.amps.par_chunks_mut(2 * stride).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            butterfly(lo, hi);
        });
    } else {
        for chunk in state.amps.chunks_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.par_chunks_mut(4096)
                .zip(hi.par_chunks_mut(4096))
                .for_each(|(l, h)| butterfly(l, h));
        }
    }
}

/// `R_X(2β) = [[cos β, -i sin β], [-i sin β, cos β]]`.
pub(crate) fn rx_matrix(beta: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new(beta.cos(), 0.0);
    let s = Complex64::new(0.0, -beta.sin());
    [[c, s], [s, c]]
}

pub fn apply_mixer_layer(state: &mut StateVector, beta: f64) {
    // Real cosine on the diagonal, -i sin off it.
    let (s, c) = beta.sin_cos();
    for q in 0..state.n {
        for_each_pair(state, q, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            *a0 = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
            *a1 = Complex64::new(c * x1.re + s * x0.im, c * x1.im - s * x0.re);
        });
    }
}

fn check_dims(state: &StateVector, g: &WeightedGraph) -> Result<()> {
    if state.n != g.n() {
        return Err(Error::InvalidInput(format!(
            "state has {} qubits, graph has {} vertices",
            state.n,
            g.n()
        )));
    }
    Ok(())
}

pub fn run_qaoa_circuit(g: &WeightedGraph, params: &QaoaParams) -> Result<StateVector> {
    let mut state = prepare_plus_state(g.n())?;
    for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
        apply_cost_layer(&mut state, g, gamma)?;
        apply_mixer_layer(&mut state, beta);
    }
    Ok(state)
}

/// `sum_k |α_k|^2 C(k)`.
pub fn exact_expectation(state: &StateVector, g: &WeightedGraph) -> Result<f64> {
    check_dims(state, g)?;
    Ok(state
        .amps
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() * cut_of_index(g, k as u64))
        .sum())
}

pub fn expectation_with_table(state: &StateVector, table: &CutTable) -> f64 {
    if state.amps.len() >= PARALLEL_MIN_AMPS {
        state
            .amps
            .par_iter()
            .zip(table.values.par_iter())
            .map(|(a, c)| a.norm_sqr() * c)
            .sum()
    } else {
        state.amps.iter().zip(&table.values).map(|(a, c)| a.norm_sqr() * c).sum()
    }
}

/// Variance of the cut value under the state's measurement distribution.
pub fn exact_variance(state: &StateVector, g: &WeightedGraph) -> Result<f64> {
    check_dims(state, g)?;
    let (m1, m2) = state
        .amps
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (k, a)| {
            let p = a.norm_sqr();
            let c = cut_of_index(g, k as u64);
            (m1 + p * c, m2 + p * c * c)
        });
    Ok((m2 - m1 * m1).max(0.0))
}

/// Repeated evaluation of one graph's QAOA circuit, reusing the cut table
/// when it fits the memory budget.
#[derive(Debug, Clone)]
pub struct QaoaEvaluator {
    graph: WeightedGraph,
    table: Option<CutTable>,
    config: SimConfig,
}

impl QaoaEvaluator {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        Self::with_config(g, SimConfig::default())
    }

    pub fn with_config(g: &WeightedGraph, config: SimConfig) -> Result<Self> {
        check_cap(g.n(), config.qubit_cap)?;
        let table_bytes = (1usize << g.n()) * std::mem::size_of::<f64>();
        let table = (table_bytes <= config.cut_table_budget_bytes).then(|| CutTable::build(g));
        Ok(Self {
            graph: g.clone(),
            table,
            config,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn table(&self) -> Option<&CutTable> {
        self.table.as_ref()
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector> {
        let mut state = prepare_plus_state_with_cap(self.graph.n(), self.config.qubit_cap)?;
        for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
            match &self.table {
                Some(t) => apply_cost_layer_table(&mut state, t, gamma)?,
                None => apply_cost_layer(&mut state, &self.graph, gamma)?,
            }
            apply_mixer_layer(&mut state, beta);
        }
        Ok(state)
    }

    pub fn expectation_of_state(&self, state: &StateVector) -> Result<f64> {
        match &self.table {
            Some(t) => Ok(expectation_with_table(state, t)),
            None => exact_expectation(state, &self.graph),
        }
    }

    pub fn expectation(&self, params: &QaoaParams) -> Result<f64> {
        let state = self.state(params)?;
        self.expectation_of_state(&state)
    }

    /// Expectation for a flat `[γ.., β..]` vector; used by the optimizers.
    pub fn expectation_flat(&self, x: &[f64]) -> f64 {
        let params = QaoaParams::from_flat(x).expect("optimizer keeps an even, finite vector");
        self.expectation(&params).expect("dimensions fixed at construction")
    }

    pub fn cut(&self, k: u64) -> f64 {
        match &self.table {
            Some(t) => t.values[k as usize],
            None => cut_of_index(&self.graph, k),
        }
    }

    /// Exact Max-Cut value (table maximum when available).
    pub fn optimum(&self) -> Result<f64> {
        match &self.table {
            Some(t) => Ok(t.max()),
            None => Ok(crate::maxcut::brute_force_maxcut(&self.graph)?.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDistribution {
    pub n: usize,
    pub counts: BTreeMap<u64, u64>,
    pub n_shots: u64,
}

impl SampleDistribution {
    pub fn probability(&self, k: u64) -> f64 {
        self.counts.get(&k).copied().unwrap_or(0) as f64 / self.n_shots as f64
    }

    /// Adds another distribution over the same qubits.
    pub fn merge(&mut self, other: &SampleDistribution) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.n_shots += other.n_shots;
    }
}

/// Draws `n_shots` outcomes from `|α_k|^2` by inverse-CDF search.
pub fn sample(state: &StateVector, n_shots: u64, rng_seed: u64) -> Result<SampleDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_with_rng(state, n_shots, &mut rng)
}

pub(crate) fn sample_with_rng(
    state: &StateVector,
    n_shots: u64,
    rng: &mut impl Rng,
) -> Result<SampleDistribution> {
    if n_shots == 0 {
        return Err(Error::InvalidInput("need at least one shot".into()));
    }
    let cumulative: Vec<f64> = state
        .amps
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a.norm_sqr();
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("non-empty state");
    let last = cumulative.len() - 1;
    let mut counts = BTreeMap::new();
    for _ in 0..n_shots {
        let u = rng.random::<f64>() * total;
        let k = cumulative.partition_point(|&c| c <= u).min(last);
        *counts.entry(k as u64).or_insert(0) += 1;
    }
    Ok(SampleDistribution {
        n: state.n,
        counts,
        n_shots,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub mean: f64,
    pub best_cut: CutAssignment,
    pub best_value: f64,
}

/// Sample mean of the cut and the best observed outcome (ties: smallest index).
pub fn estimate_from_samples(dist: &SampleDistribution, g: &WeightedGraph) -> Result<SampleEstimate> {
    if dist.n != g.n() {
        return Err(Error::InvalidInput(format!(
            "distribution over {} qubits, graph has {} vertices",
            dist.n,
            g.n()
        )));
    }
    if dist.counts.is_empty() || dist.n_shots == 0 {
        return Err(Error::InvalidInput("empty sample distribution".into()));
    }
    let mut mean = 0.0;
    let mut best: Option<(f64, u64)> = None;
    // BTreeMap iterates in ascending index order, so strict `>` keeps the smallest index.
    for (&k, &count) in &dist.counts {
        let c = cut_of_index(g, k);
        mean += count as f64 * c;
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, k));
        }
    }
    let (best_value, best_index) = best.expect("non-empty");
    Ok(SampleEstimate {
        mean: mean / dist.n_shots as f64,
        best_cut: CutAssignment::from_index(best_index, g.n()),
        best_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn plus_states() {
        let s1 = prepare_plus_state(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s1.amplitudes().iter().all(|&a| close(a, Complex64::new(h, 0.0))));
        let s2 = prepare_plus_state(2).unwrap();
        assert!(s2.amplitudes().iter().all(|&a| a == Complex64::new(0.5, 0.0)));
        let s10 = prepare_plus_state(10).unwrap();
        assert!((s10.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(s10.amplitudes().windows(2).all(|w| w[0] == w[1]));
        assert!(matches!(
            prepare_plus_state(25),
            Err(Error::OverLimit { limit: 24, .. })
        ));
        assert!(prepare_plus_state(0).is_err());
    }

    #[test]
    fn zero_angles_are_identity() {
        let g = WeightedGraph::complete(3);
        let plus = prepare_plus_state(3).unwrap();
        let mut s = plus.clone();
        apply_cost_layer(&mut s, &g, 0.0).unwrap();
        apply_mixer_layer(&mut s, 0.0);
        assert_eq!(s, plus);
        let params = QaoaParams::new(vec![0.0], vec![0.0]).unwrap();
        assert_eq!(run_qaoa_circuit(&g, &params).unwrap(), plus);
    }

    #[test]
    fn cost_phase_on_single_edge() {
        let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
        let mut s = prepare_plus_state(2).unwrap();
        apply_cost_layer(&mut s, &g, PI).unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], Complex64::new(0.5, 0.0)));
        assert!(close(a[3], Complex64::new(0.5, 0.0)));
        assert!(close(a[1], Complex64::new(0.5, 0.0) * Complex64::cis(-PI)));
        assert!(close(a[2], Complex64::new(0.5, 0.0) * Complex64::cis(-PI)));
        assert!(s.probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn rx_pi_maps_zero_to_minus_i_one() {
        let mut s = StateVector::basis(1, 0).unwrap();
        apply_mixer_layer(&mut s, PI / 2.0);
        assert!(close(s.amplitudes()[0], Complex64::new(0.0, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn single_edge_closed_form() {
        // <C> = 1/2 + sin(γ) sin(4β) / 2 for one unit edge at p = 1
        let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
        for (gamma, beta) in [(PI / 2.0, PI / 8.0), (PI / 2.0, PI / 4.0), (0.3, 1.1)] {
            let params = QaoaParams::new(vec![gamma], vec![beta]).unwrap();
            let s = run_qaoa_circuit(&g, &params).unwrap();
            let expected = 0.5 + 0.5 * gamma.sin() * (4.0 * beta).sin();
            assert!((exact_expectation(&s, &g).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn table_matches_direct_cuts() {
        let g = WeightedGraph::new(5, [(0, 1, 0.3), (1, 4, 1.0), (2, 3, 0.7), (0, 4, 0.5)]).unwrap();
        let table = CutTable::build(&g);
        for k in 0..32u64 {
            assert!((table.values()[k as usize] - cut_of_index(&g, k)).abs() < 1e-14);
        }
    }

    #[test]
    fn table_and_streaming_paths_agree() {
        let g = WeightedGraph::new(4, [(0, 1, 0.3), (1, 2, 1.0), (2, 3, 0.7), (0, 3, 0.5)]).unwrap();
        let params = QaoaParams::new(vec![0.4, 1.3], vec![0.2, 0.9]).unwrap();
        let direct = run_qaoa_circuit(&g, &params).unwrap();
        let eval = QaoaEvaluator::new(&g).unwrap();
        assert!(eval.table().is_some());
        let tabled = eval.state(&params).unwrap();
        for (a, b) in direct.amplitudes().iter().zip(tabled.amplitudes()) {
            assert!((a - b).norm() < 1e-13);
        }
        let streaming = QaoaEvaluator::with_config(
            &g,
            SimConfig {
                cut_table_budget_bytes: 0,
                ..SimConfig::default()
            },
        )
        .unwrap();
        assert!(streaming.table().is_none());
        assert!((streaming.expectation(&params).unwrap() - eval.expectation(&params).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn expectation_examples() {
        let g = WeightedGraph::new(3, [(0, 1, 0.5), (1, 2, 1.0)]).unwrap();
        let plus = prepare_plus_state(3).unwrap();
        assert!((exact_expectation(&plus, &g).unwrap() - 0.75).abs() < 1e-15);
        let basis = StateVector::basis(3, 0b010).unwrap();
        assert_eq!(exact_expectation(&basis, &g).unwrap(), 1.5);
    }

    #[test]
    fn params_validation_and_canonical_form() {
        assert!(QaoaParams::new(vec![], vec![]).is_err());
        assert!(QaoaParams::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(QaoaParams::new(vec![f64::INFINITY], vec![1.0]).is_err());
        let p = QaoaParams::new(vec![7.0, -1.0], vec![4.0, -0.5]).unwrap();
        let c = p.canonical();
        assert!((c.gamma()[0] - (7.0 - TAU)).abs() < 1e-15);
        assert!((c.gamma()[1] - (TAU - 1.0)).abs() < 1e-15);
        assert!((c.beta()[0] - (4.0 - PI)).abs() < 1e-15);
        assert!((c.beta()[1] - (PI - 0.5)).abs() < 1e-15);
        assert_eq!(QaoaParams::from_flat(&p.to_flat()).unwrap(), p);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<QaoaParams>(&json).unwrap(), p);
        assert!(serde_json::from_str::<QaoaParams>(r#"{"p":3,"gamma":[1],"beta":[1]}"#).is_err());
    }

    #[test]
    fn sampling_a_basis_state() {
        let s = StateVector::basis(3, 5).unwrap();
        let d = sample(&s, 1000, 42).unwrap();
        assert_eq!(d.counts.len(), 1);
        assert_eq!(d.counts[&5], 1000);
        assert!(sample(&s, 0, 1).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let s = prepare_plus_state(4).unwrap();
        assert_eq!(sample(&s, 500, 9).unwrap(), sample(&s, 500, 9).unwrap());
        assert_ne!(sample(&s, 500, 9).unwrap(), sample(&s, 500, 10).unwrap());
    }

    #[test]
    fn estimate_examples() {
        let g = WeightedGraph::unweighted(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        // index 0b0101 cuts all 3 edges, 0b0001 cuts 1
        let dist = SampleDistribution {
            n: 4,
            counts: BTreeMap::from([(0b0101, 3), (0b0001, 1)]),
            n_shots: 4,
        };
        let est = estimate_from_samples(&dist, &g).unwrap();
        assert_eq!(est.mean, 2.5);
        assert_eq!(est.best_value, 3.0);
        assert_eq!(est.best_cut.index(), 0b0101);

        let single = SampleDistribution {
            n: 4,
            counts: BTreeMap::from([(0b0001, 7)]),
            n_shots: 7,
        };
        let est = estimate_from_samples(&single, &g).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.best_value, 1.0);

        // tie between 0b0101 and 0b1010 (both cut 3): smallest index wins
        let tie = SampleDistribution {
            n: 4,
            counts: BTreeMap::from([(0b1010, 1), (0b0101, 1)]),
            n_shots: 2,
        };
        assert_eq!(estimate_from_samples(&tie, &g).unwrap().best_cut.index(), 0b0101);
    }

    #[test]
    fn large_state_uses_parallel_kernels_consistently() {
        // 15 qubits crosses PARALLEL_MIN_AMPS; compare against the small-state path qubit-by-qubit
        let n = 15;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 0.5 + 0.03 * i as f64)).collect();
        let g = WeightedGraph::new(n, edges).unwrap();
        let params = QaoaParams::new(vec![0.7], vec![0.3]).unwrap();
        let s = run_qaoa_circuit(&g, &params).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let eval = QaoaEvaluator::new(&g).unwrap();
        let a = eval.expectation(&params).unwrap();
        let b = exact_expectation(&s, &g).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
