mod common;

use common::{on_qubit, pauli_x, pauli_z};
use dqaoa::graph::WeightedGraph;
use dqaoa::noise::{noisy_expectation, run_noisy_qaoa_density, run_noisy_qaoa_trajectories, NoiseModel};
use dqaoa::simulator::QaoaParams;
use nalgebra::DMatrix;
use num_complex::Complex64;

type Mat = DMatrix<Complex64>;

fn paulis() -> [Mat; 4] {
    let i = Complex64::new(0.0, 1.0);
    let y = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)]);
    [DMatrix::identity(2, 2), pauli_x(), y, pauli_z()]
}

fn unitary(rho: &Mat, u: &Mat) -> Mat {
    u * rho * u.adjoint()
}

/// `(1 - p) ρ + p / 4^q Σ_P P ρ P` over all Paulis on `support`.
fn kraus_depolarize(rho: &Mat, support: &[usize], n: usize, p: f64) -> Mat {
    let dim = 1 << n;
    let mut ops = vec![DMatrix::<Complex64>::identity(dim, dim)];
    for &q in support {
        ops = ops
            .iter()
            .flat_map(|op| paulis().into_iter().map(move |pq| op * on_qubit(&pq, q, n)))
            .collect();
    }
    let weight = p / ops.len() as f64;
    let mut out = rho * Complex64::new(1.0 - p, 0.0);
    for op in &ops {
        out += unitary(rho, op) * Complex64::new(weight, 0.0);
    }
    out
}

fn kraus_oracle(g: &WeightedGraph, params: &QaoaParams, noise: NoiseModel) -> Mat {
    let n = g.n();
    let dim = 1 << n;
    let plus = DMatrix::from_element(dim, 1, Complex64::new(1.0 / (dim as f64).sqrt(), 0.0));
    let mut rho = &plus * plus.adjoint();
    for (&gamma, &beta) in params.gamma().iter().zip(params.beta()) {
        for e in g.edges() {
            let phase = Complex64::cis(-gamma * e.w);
            let diag = (0..dim).map(|k| if (k >> e.i ^ k >> e.j) & 1 == 1 { phase } else { Complex64::new(1.0, 0.0) });
            let u = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, diag));
            rho = kraus_depolarize(&unitary(&rho, &u), &[e.i, e.j], n, noise.p2);
        }
        let (s, c) = beta.sin_cos();
        let rx = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(c, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        );
        for q in 0..n {
            rho = kraus_depolarize(&unitary(&rho, &on_qubit(&rx, q, n)), &[q], n, noise.p1);
        }
    }
    rho
}

fn ring(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

#[test]
fn density_matrix_matches_kraus_oracle() {
    let g = ring(4);
    let params = QaoaParams::new(vec![0.7], vec![0.4]).unwrap();
    let rho = run_noisy_qaoa_density(&g, &params, NoiseModel::MODEL_I).unwrap();
    let oracle = kraus_oracle(&g, &params, NoiseModel::MODEL_I);
    let mut worst = 0.0f64;
    for k in 0..16 {
        for l in 0..16 {
            worst = worst.max((rho.get(k, l) - oracle[(k, l)]).norm());
        }
    }
    assert!(worst <= 1e-8, "max entry error {worst:e}");
}

#[test]
fn weighted_two_layer_circuit_matches_kraus_oracle() {
    let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 0.3), (0, 2, 0.6)]).unwrap();
    let params = QaoaParams::new(vec![0.5, 1.3], vec![0.9, 0.2]).unwrap();
    let noise = NoiseModel::new(0.05, 0.2).unwrap();
    let rho = run_noisy_qaoa_density(&g, &params, noise).unwrap();
    let oracle = kraus_oracle(&g, &params, noise);
    for k in 0..8 {
        for l in 0..8 {
            assert!((rho.get(k, l) - oracle[(k, l)]).norm() <= 1e-8);
        }
    }
}

#[test]
fn trajectories_agree_with_density_matrix() {
    let g = ring(6);
    let params = QaoaParams::new(vec![0.6, 0.9], vec![0.5, 0.25]).unwrap();
    for noise in [NoiseModel::MODEL_II, NoiseModel::MODEL_I] {
        let exact = noisy_expectation(&run_noisy_qaoa_density(&g, &params, noise).unwrap(), &g).unwrap();
        let traj = run_noisy_qaoa_trajectories(&g, &params, noise, 500, 500 * 64, 41).unwrap();
        let z = (traj.mean() - exact).abs() / traj.standard_error();
        assert!(z <= 3.0, "z = {z:.2}");
    }
}

#[test]
fn trajectory_error_shrinks_with_count() {
    let g = ring(6);
    let params = QaoaParams::new(vec![0.6], vec![0.5]).unwrap();
    // Strong enough that almost every trajectory carries a fault.
    let noise = NoiseModel::new(0.05, 0.2).unwrap();
    let se = |n_traj: usize| {
        run_noisy_qaoa_trajectories(&g, &params, noise, n_traj, n_traj as u64 * 32, 42)
            .unwrap()
            .standard_error()
    };
    let ratio = se(10) / se(1000);
    assert!((4.0..25.0).contains(&ratio), "standard error ratio {ratio:.2}, expected about 10");
}
