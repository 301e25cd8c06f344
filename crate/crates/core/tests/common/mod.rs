//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use dqaoa::graph::{random_graph, GraphGenSpec, WeightedGraph};
use dqaoa::maxcut::{cut_value, CutAssignment};
use dqaoa::simulator::QaoaParams;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// `op` on qubit `q` of `n`, identity elsewhere. Qubit 0 is the least
/// significant bit of the basis index.
pub fn on_qubit(op: &DMatrix<Complex64>, q: usize, n: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for b in (0..n).rev() {
        out = kron(&out, if b == q { op } else { &id });
    }
    out
}

pub fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// `Σ w_ij (I - Z_i Z_j) / 2` as a dense matrix.
pub fn cost_hamiltonian(g: &WeightedGraph) -> DMatrix<Complex64> {
    let n = g.n();
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    let id = DMatrix::<Complex64>::identity(dim, dim);
    for e in g.edges() {
        let zz = on_qubit(&pauli_z(), e.i, n) * on_qubit(&pauli_z(), e.j, n);
        h += (&id - zz) * c(e.w / 2.0);
    }
    h
}

/// `Σ_j X_j` as a dense matrix.
pub fn mixer_hamiltonian(n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    (0..n).fold(DMatrix::zeros(dim, dim), |acc, q| acc + on_qubit(&pauli_x(), q, n))
}

/// QAOA state by dense matrix exponentials of the two Hamiltonians.
pub fn dense_qaoa_state(g: &WeightedGraph, params: &QaoaParams) -> DVector<Complex64> {
    let n = g.n();
    let dim = 1 << n;
    let hc = cost_hamiltonian(g);
    let hb = mixer_hamiltonian(n);
    let mut psi = DVector::from_element(dim, c(1.0 / (dim as f64).sqrt()));
    let minus_i = Complex64::new(0.0, -1.0);
    for (&gamma, &beta) in params.gamma().iter().zip(params.beta()) {
        psi = (&hc * (minus_i * gamma)).exp() * psi;
        psi = (&hb * (minus_i * beta)).exp() * psi;
    }
    psi
}

/// `<ψ|H_C|ψ>` from the dense cost matrix.
pub fn dense_expectation(g: &WeightedGraph, psi: &DVector<Complex64>) -> f64 {
    let hpsi = cost_hamiltonian(g) * psi;
    psi.dotc(&hpsi).re
}

/// Largest `|a_k - e^{iφ} b_k|` after removing the best global phase.
pub fn distance_up_to_phase(a: &[Complex64], b: &DVector<Complex64>) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0) };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Max-Cut by evaluating every one of the `2^n` assignments.
pub fn naive_maxcut(g: &WeightedGraph) -> f64 {
    (0..1u64 << g.n())
        .map(|k| cut_value(g, &CutAssignment::from_index(k, g.n())).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Weighted random graph with a random removal probability.
pub fn random_weighted(n: usize, rng: &mut ChaCha8Rng) -> WeightedGraph {
    random_graph(&GraphGenSpec {
        n,
        zero_probability: rng.random::<f64>() * 0.8,
        weighted: true,
        rng_seed: rng.random(),
    })
    .unwrap()
}

pub fn random_params(p: usize, rng: &mut ChaCha8Rng) -> QaoaParams {
    QaoaParams::new(
        (0..p).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect(),
        (0..p).map(|_| rng.random::<f64>() * std::f64::consts::PI).collect(),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
