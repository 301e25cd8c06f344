//! QAOA under depolarizing gate noise.
//!
//! The circuit is decomposed into native gates: per layer one two-qubit
//! `exp(-i γ w_ij (I - Z_i Z_j) / 2)` per edge and one `R_X(2β)` per qubit.
//! Each gate is followed by a depolarizing channel on its support,
//!
//! ```text
//! D_q(ρ) = (1 - p) ρ + p · I/2^q ⊗ Tr_q(ρ)
//! ```
//!
//! with `p = p2` for the two-qubit gates and `p = p1` for the single-qubit
//! gates. State preparation is noiseless.
//!
//! Two estimators are provided: an exact density-matrix evolution (memory
//! `4^n`, capped at [`DENSITY_QUBIT_CAP`] qubits by default) and a Monte Carlo
//! unraveling over pure-state trajectories.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::maxcut::cut_of_index;
use crate::simulator::{
    apply_edge_phase, apply_single_qubit, prepare_plus_state, rx_matrix, sample_with_rng,
    QaoaParams, SampleDistribution, StateVector,
};

pub const DENSITY_QUBIT_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub p2: f64,
}

impl NoiseModel {
    /// 0.1% single-qubit, 1% two-qubit error.
    pub const MODEL_I: NoiseModel = NoiseModel { p1: 1e-3, p2: 1e-2 };
    /// 0.01% single-qubit, 0.1% two-qubit error.
    pub const MODEL_II: NoiseModel = NoiseModel { p1: 1e-4, p2: 1e-3 };
    pub const NOISELESS: NoiseModel = NoiseModel { p1: 0.0, p2: 0.0 };

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(p1) || !ok(p2) {
            return Err(Error::InvalidInput(format!(
                "depolarizing probabilities must lie in [0, 1], got p1 = {p1}, p2 = {p2}"
            )));
        }
        Ok(Self { p1, p2 })
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// `I`, `II`, or `custom:<p1>,<p2>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Self::MODEL_I),
            "II" => Ok(Self::MODEL_II),
            _ => {
                let bad = || Error::InvalidInput(format!("unknown noise model '{s}'"));
                let rest = s.strip_prefix("custom:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                let p1 = a.trim().parse().map_err(|_| bad())?;
                let p2 = b.trim().parse().map_err(|_| bad())?;
                Self::new(p1, p2)
            }
        }
    }
}

/// Row-major `2^n × 2^n` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    rho: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        let rho = a
            .iter()
            .flat_map(|x| a.iter().map(move |y| x * y.conj()))
            .collect();
        Self { n: state.n(), rho }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
        for k in 0..d {
            rho[k * d + k] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Self { n, rho }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.rho[k * self.dim() + l]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|k| self.get(k, k)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.get(k, k).re).collect()
    }

    /// Largest `|ρ_kl - conj(ρ_lk)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|k| (0..d).map(move |l| (k, l)))
            .map(|(k, l)| (self.get(k, l) - self.get(l, k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        self.rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn edge_phase(&mut self, i: usize, j: usize, theta: f64) {
        let d = self.dim();
        let ph = Complex64::cis(-theta);
        let ph_conj = ph.conj();
        let differs = |k: usize| (k >> i ^ k >> j) & 1 == 1;
        self.rho.par_chunks_mut(d).enumerate().for_each(|(k, row)| {
            let dk = differs(k);
            for (l, x) in row.iter_mut().enumerate() {
                match (dk, differs(l)) {
                    (true, false) => *x *= ph,
                    (false, true) => *x *= ph_conj,
                    _ => {}
                }
            }
        });
    }

    /// `ρ -> U ρ U†` for a single-qubit `U`.
    fn single_qubit(&mut self, q: usize, u: [[Complex64; 2]; 2]) {
        let d = self.dim();
        let bit = 1usize << q;
        // U ρ: mix row pairs.
        for k0 in (0..d).filter(|k| k & bit == 0) {
            let k1 = k0 | bit;
            for l in 0..d {
                let a = self.rho[k0 * d + l];
                let b = self.rho[k1 * d + l];
                self.rho[k0 * d + l] = u[0][0] * a + u[0][1] * b;
                self.rho[k1 * d + l] = u[1][0] * a + u[1][1] * b;
            }
        }
        // (Uρ) U†: mix column pairs with conj(U).
        self.rho.par_chunks_mut(d).for_each(|row| {
            for l0 in (0..d).filter(|l| l & bit == 0) {
                let l1 = l0 | bit;
                let a = row[l0];
                let b = row[l1];
                row[l0] = a * u[0][0].conj() + b * u[0][1].conj();
                row[l1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        });
    }

    /// Depolarizing channel on the qubits in `mask`.
    fn depolarize(&mut self, mask: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let d = self.dim();
        let q = mask.count_ones();
        let subsets: Vec<usize> = (0..1usize << q)
            .map(|s| scatter_bits(s, mask))
            .collect();
        let mix = p / (1u64 << q) as f64;
        let keep = 1.0 - p;
        for kb in (0..d).filter(|k| k & mask == 0) {
            for lb in (0..d).filter(|l| l & mask == 0) {
                let partial: Complex64 = subsets.iter().map(|&a| self.rho[(kb | a) * d + (lb | a)]).sum();
                for &a in &subsets {
                    for &b in &subsets {
                        let idx = (kb | a) * d + (lb | b);
                        self.rho[idx] *= keep;
                        if a == b {
                            self.rho[idx] += partial * mix;
                        }
                    }
                }
            }
        }
    }
}

/// Places the low bits of `s` onto the set bits of `mask`, in order.
fn scatter_bits(s: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut k = 0;
    for b in 0..usize::BITS as usize {
        if mask >> b & 1 == 1 {
            if s >> k & 1 == 1 {
                out |= 1 << b;
            }
            k += 1;
        }
    }
    out
}

pub fn run_noisy_qaoa_density(
    g: &WeightedGraph,
    params: &QaoaParams,
    noise: NoiseModel,
) -> Result<DensityMatrix> {
    run_noisy_qaoa_density_with_cap(g, params, noise, DENSITY_QUBIT_CAP)
}

pub fn run_noisy_qaoa_density_with_cap(
    g: &WeightedGraph,
    params: &QaoaParams,
    noise: NoiseModel,
    cap: usize,
) -> Result<DensityMatrix> {
    if g.n() > cap {
        return Err(Error::InvalidInput(format!(
            "density-matrix simulation is capped at {cap} qubits (graph has {}); use the trajectory method",
            g.n()
        )));
    }
    let mut rho = DensityMatrix::from_pure(&prepare_plus_state(g.n())?);
    for (&gamma, &beta) in params.gamma().iter().zip(params.beta()) {
        for e in g.edges() {
            rho.edge_phase(e.i, e.j, gamma * e.w);
            rho.depolarize(1 << e.i | 1 << e.j, noise.p2);
        }
        let u = rx_matrix(beta);
        for q in 0..g.n() {
            rho.single_qubit(q, u);
            rho.depolarize(1 << q, noise.p1);
        }
    }
    Ok(rho)
}

/// `Tr(ρ H_C)`; only the diagonal is read.
pub fn noisy_expectation(rho: &DensityMatrix, g: &WeightedGraph) -> Result<f64> {
    if rho.n != g.n() {
        return Err(Error::InvalidInput(format!(
            "density matrix has {} qubits, graph has {} vertices",
            rho.n,
            g.n()
        )));
    }
    Ok(rho
        .diagonal()
        .iter()
        .enumerate()
        .map(|(k, &p)| p * cut_of_index(g, k as u64))
        .sum())
}

/// Draws `n_shots` outcomes from the diagonal of `rho`.
pub fn sample_density(rho: &DensityMatrix, n_shots: u64, rng_seed: u64) -> Result<SampleDistribution> {
    let amps = rho
        .diagonal()
        .into_iter()
        .map(|p| Complex64::new(p.max(0.0).sqrt(), 0.0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_with_rng(&StateVector::from_amplitudes(amps)?, n_shots, &mut rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryResult {
    /// Shots pooled across all trajectories.
    pub distribution: SampleDistribution,
    /// Exact cut expectation of each trajectory's final pure state.
    pub trajectory_means: Vec<f64>,
}

impl TrajectoryResult {
    pub fn mean(&self) -> f64 {
        self.trajectory_means.iter().sum::<f64>() / self.trajectory_means.len() as f64
    }

    /// Standard error of [`Self::mean`] across trajectories.
    pub fn standard_error(&self) -> f64 {
        let t = self.trajectory_means.len() as f64;
        if t < 2.0 {
            return f64::INFINITY;
        }
        let mean = self.mean();
        let var = self
            .trajectory_means
            .iter()
            .map(|x| (x - mean).powi(2))
            .sum::<f64>()
            / (t - 1.0);
        (var / t).sqrt()
    }
}

/// Seed of trajectory `t`; trajectory 0 uses `seed` itself.
pub fn trajectory_seed(seed: u64, t: u64) -> u64 {
    seed ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Pauli matrices I, X, Y, Z.
fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => [[one, o], [o, one]],
        1 => [[o, one], [one, o]],
        2 => [[o, -i], [i, o]],
        _ => [[one, o], [o, -one]],
    }
}

/// Unraveling of `D_q` with probability `p`: with probability
/// `p (4^q - 1) / 4^q` apply a uniformly chosen non-identity Pauli string.
fn maybe_pauli(state: &mut StateVector, qubits: &[usize], p: f64, rng: &mut ChaCha8Rng) {
    if p == 0.0 {
        return;
    }
    let strings = 1usize << (2 * qubits.len());
    let p_error = p * (strings - 1) as f64 / strings as f64;
    if rng.random::<f64>() >= p_error {
        return;
    }
    let pick = rng.random_range(1..strings);
    for (slot, &q) in qubits.iter().enumerate() {
        let which = pick >> (2 * slot) & 3;
        if which != 0 {
            apply_single_qubit(state, q, pauli(which));
        }
    }
}

/// Monte Carlo trajectories; `n_shots` are split as evenly as possible
/// across `n_traj` trajectories and pooled.
pub fn run_noisy_qaoa_trajectories(
    g: &WeightedGraph,
    params: &QaoaParams,
    noise: NoiseModel,
    n_traj: usize,
    n_shots: u64,
    rng_seed: u64,
) -> Result<TrajectoryResult> {
    if n_traj == 0 || n_shots == 0 {
        return Err(Error::InvalidInput(
            "need at least one trajectory and one shot".into(),
        ));
    }
    let base = n_shots / n_traj as u64;
    let extra = n_shots % n_traj as u64;
    let runs: Vec<(f64, Option<SampleDistribution>)> = (0..n_traj as u64)
        .into_par_iter()
        .map(|t| {
            let seed = trajectory_seed(rng_seed, t);
            let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
            noise_rng.set_stream(1);
            let mut state = prepare_plus_state(g.n())?;
            for (&gamma, &beta) in params.gamma().iter().zip(params.beta()) {
                for e in g.edges() {
                    apply_edge_phase(&mut state, e.i, e.j, gamma * e.w);
                    maybe_pauli(&mut state, &[e.i, e.j], noise.p2, &mut noise_rng);
                }
                let u = rx_matrix(beta);
                for q in 0..g.n() {
                    apply_single_qubit(&mut state, q, u);
                    maybe_pauli(&mut state, &[q], noise.p1, &mut noise_rng);
                }
            }
            let mean = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm_sqr() * cut_of_index(g, k as u64))
                .sum();
            let shots = base + u64::from(t < extra);
            let dist = if shots > 0 {
                let mut shot_rng = ChaCha8Rng::seed_from_u64(seed);
                Some(sample_with_rng(&state, shots, &mut shot_rng)?)
            } else {
                None
            };
            Ok((mean, dist))
        })
        .collect::<Result<_>>()?;

    let mut distribution = SampleDistribution {
        n: g.n(),
        counts: Default::default(),
        n_shots: 0,
    };
    let mut trajectory_means = Vec::with_capacity(n_traj);
    for (mean, dist) in runs {
        trajectory_means.push(mean);
        if let Some(d) = dist {
            distribution.merge(&d);
        }
    }
    Ok(TrajectoryResult {
        distribution,
        trajectory_means,
    })
}
