//! Parameter optimization for QAOA angles.
//!
//! * [`multistart_optimize`]: uniform starts in `[0, 2π]^p × [0, π]^p`, each
//!   refined by a damped finite-difference Newton ascent on the exact
//!   expectation.
//! * [`cobyla_maximize`]: derivative-free trust-region search on a linear
//!   model interpolated over a simplex, for objectives that fluctuate (sampled
//!   expectations).
//! * [`fourier_optimize`]: the FOURIER ladder, optimizing sine/cosine
//!   coefficients and warm-starting each depth from the previous one.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::simulator::{QaoaEvaluator, QaoaParams};

/// Cap on the default `p · (n + m)` start count.
pub const MAX_DEFAULT_STARTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub params: QaoaParams,
    pub value: f64,
    pub ratio: f64,
    pub evaluations: usize,
    pub starts_used: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Central-difference step in radians.
    pub fd_step: f64,
    /// Stop after two consecutive accepted steps gaining less than this.
    pub value_tol: f64,
    /// Stop once the finite-difference gradient norm falls below this.
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            fd_step: 1e-4,
            value_tol: 1e-8,
            grad_tol: 1e-6,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

fn fd_gradient_hessian(
    f: &mut impl FnMut(&[f64]) -> f64,
    x: &[f64],
    fx: f64,
    h: f64,
) -> (DVector<f64>, DMatrix<f64>) {
    let d = x.len();
    let mut grad = DVector::zeros(d);
    let mut hess = DMatrix::zeros(d, d);
    let mut probe = x.to_vec();
    for i in 0..d {
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
        hess[(i, i)] = (fp - 2.0 * fx + fm) / (h * h);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut corner = |si: f64, sj: f64| {
                probe[i] = x[i] + si * h;
                probe[j] = x[j] + sj * h;
                let v = f(&probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    (grad, hess)
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Maximizes `f` from `x0` with Levenberg-damped Newton steps built from
/// finite differences. A step is only accepted when it strictly increases
/// `f`; on rejection the damping grows, which turns the step into a short
/// gradient step on non-concave patches.
pub fn newton_ascent(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &NewtonOptions,
) -> AscentOutcome {
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut fx = eval(&x);
    let mut lambda = 1e-3;
    let mut small_gains = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let (grad, hess) = fd_gradient_hessian(&mut eval, &x, fx, opts.fd_step);
        if grad.norm() <= opts.grad_tol {
            converged = true;
            break;
        }
        let neg_hess = -hess;
        let mut accepted = None;
        while lambda <= 1e12 {
            let shifted = &neg_hess + DMatrix::identity(d, d) * lambda;
            let Some(chol) = shifted.cholesky() else {
                lambda = (lambda * 10.0).max(1e-6);
                continue;
            };
            let step = chol.solve(&grad);
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + s).collect();
            let ft = eval(&trial);
            if ft > fx {
                accepted = Some((trial, ft));
                lambda = (lambda / 10.0).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }
        let Some((trial, ft)) = accepted else {
            // No ascent direction found at any damping: numerically stationary.
            converged = true;
            break;
        };
        let gain = ft - fx;
        x = trial;
        fx = ft;
        if gain < opts.value_tol {
            small_gains += 1;
            if small_gains >= 2 {
                converged = true;
                break;
            }
        } else {
            small_gains = 0;
        }
    }
    AscentOutcome {
        x,
        value: fx,
        evaluations,
        iterations,
        converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MultistartOptions {
    /// `None` uses `min(200, p · (n + m))`.
    pub n_starts: Option<usize>,
    pub newton: NewtonOptions,
}

pub fn default_start_count(g: &WeightedGraph, p: usize) -> usize {
    (p * (g.n() + g.m())).clamp(1, MAX_DEFAULT_STARTS)
}

/// Uniform starts, drawn sequentially from one seeded stream so that the
/// first `k` starts of a larger run are the starts of a `k`-start run.
pub fn draw_starts(p: usize, count: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..p).map(|_| rng.random::<f64>() * TAU).collect();
            x.extend((0..p).map(|_| rng.random::<f64>() * PI));
            x
        })
        .collect()
}

pub fn multistart_optimize(
    g: &WeightedGraph,
    p: usize,
    opts: &MultistartOptions,
    rng_seed: u64,
) -> Result<OptimizeResult> {
    let eval = QaoaEvaluator::new(g)?;
    multistart_with_evaluator(&eval, p, opts, rng_seed)
}

pub fn multistart_with_evaluator(
    eval: &QaoaEvaluator,
    p: usize,
    opts: &MultistartOptions,
    rng_seed: u64,
) -> Result<OptimizeResult> {
    if p < 1 {
        return Err(Error::InvalidInput("layer count p must be at least 1".into()));
    }
    let optimum = eval.optimum()?;
    let n_starts = opts
        .n_starts
        .unwrap_or_else(|| default_start_count(eval.graph(), p))
        .max(1);
    let starts = draw_starts(p, n_starts, rng_seed);
    let outcomes: Vec<AscentOutcome> = starts
        .par_iter()
        .map(|x0| newton_ascent(|x| eval.expectation_flat(x), x0, &opts.newton))
        .collect();
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    // Earliest start wins ties so results do not depend on scheduling.
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one start");
    Ok(OptimizeResult {
        params: QaoaParams::from_flat(&best.x)?,
        value: best.value,
        ratio: best.value / optimum,
        evaluations,
        starts_used: n_starts,
        converged: best.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CobylaOptions {
    /// Maximum objective evaluations.
    pub budget: usize,
    /// Initial trust-region radius and simplex edge.
    pub rho_begin: f64,
    /// Final trust-region radius.
    pub rho_end: f64,
}

impl Default for CobylaOptions {
    fn default() -> Self {
        Self {
            budget: 200,
            rho_begin: 0.5,
            rho_end: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CobylaOutcome {
    /// Best point seen.
    pub x: Vec<f64>,
    /// Objective value recorded at `x`.
    pub value: f64,
    pub evaluations: usize,
    /// False when the budget ran out before the radius reached `rho_end`.
    pub converged: bool,
}

/// Derivative-free maximization with a linear model over a simplex of
/// `d + 1` points and a trust region of radius ρ.
///
/// Each iteration either improves the simplex geometry or takes the
/// model step `-ρ ∇/|∇|`; ρ is halved when a step gains less than a tenth of
/// its prediction while the simplex is well shaped.
pub fn cobyla_maximize(
    mut objective: impl FnMut(&[f64]) -> f64,
    init: &[f64],
    opts: &CobylaOptions,
) -> Result<CobylaOutcome> {
    let d = init.len();
    if d == 0 {
        return Err(Error::InvalidInput("cannot optimize over zero variables".into()));
    }
    if opts.budget < d + 2 {
        return Err(Error::InvalidInput(format!(
            "COBYLA budget {} is below the minimum {} for {d} variables",
            opts.budget,
            d + 2
        )));
    }
    if !(opts.rho_begin > 0.0 && opts.rho_end > 0.0 && opts.rho_end <= opts.rho_begin) {
        return Err(Error::InvalidInput("need 0 < rho_end <= rho_begin".into()));
    }

    // Minimize the negated objective internally.
    let mut evaluations = 0usize;
    let mut best: (Vec<f64>, f64) = (init.to_vec(), f64::INFINITY);
    let mut eval = |x: &[f64], best: &mut (Vec<f64>, f64), evaluations: &mut usize| {
        *evaluations += 1;
        let v = -objective(x);
        if v < best.1 {
            *best = (x.to_vec(), v);
        }
        v
    };

    let mut rho = opts.rho_begin;
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    points.push(init.to_vec());
    values.push(eval(init, &mut best, &mut evaluations));
    for i in 0..d {
        let mut x = init.to_vec();
        x[i] += rho;
        values.push(eval(&x, &mut best, &mut evaluations));
        points.push(x);
    }

    let mut converged = false;
    while evaluations < opts.budget {
        // Lowest value becomes the base vertex.
        let b = (0..=d)
            .min_by(|&i, &j| values[i].total_cmp(&values[j]))
            .expect("non-empty simplex");
        points.swap(0, b);
        values.swap(0, b);

        let dirs = DMatrix::from_fn(d, d, |i, k| points[i + 1][k] - points[0][k]);
        let Some(dual) = dirs.clone().try_inverse() else {
            return Err(Error::Numeric("COBYLA simplex became degenerate".into()));
        };
        let diffs = DVector::from_fn(d, |i, _| values[i + 1] - values[0]);
        let grad = &dual * &diffs;

        let dist: Vec<f64> = (0..d).map(|i| dirs.row(i).norm()).collect();
        // Distance from vertex i to the face opposite it.
        let height: Vec<f64> = (0..d).map(|i| 1.0 / dual.column(i).norm()).collect();
        let too_far = (0..d).max_by(|&i, &j| dist[i].total_cmp(&dist[j])).filter(|&i| dist[i] > 2.1 * rho);
        let too_flat = (0..d)
            .min_by(|&i, &j| height[i].total_cmp(&height[j]))
            .filter(|&i| height[i] < 0.25 * rho);

        if let Some(j) = too_far.or(too_flat) {
            let normal = dual.column(j).normalize();
            let mut dx = normal * (0.5 * rho);
            if grad.dot(&dx) > 0.0 {
                dx = -dx;
            }
            let x: Vec<f64> = points[0].iter().zip(dx.iter()).map(|(a, s)| a + s).collect();
            values[j + 1] = eval(&x, &mut best, &mut evaluations);
            points[j + 1] = x;
            continue;
        }

        let gnorm = grad.norm();
        let mut poor_step = true;
        if gnorm > 0.0 && gnorm.is_finite() {
            let dx = &grad * (-rho / gnorm);
            let x: Vec<f64> = points[0].iter().zip(dx.iter()).map(|(a, s)| a + s).collect();
            let fx = eval(&x, &mut best, &mut evaluations);
            let predicted = rho * gnorm;
            let actual = values[0] - fx;
            poor_step = actual < 0.1 * predicted;
            // Swap the trial point in where it best preserves simplex volume.
            let coeffs = dual.transpose() * &dx;
            let j = (0..d)
                .max_by(|&i, &k| {
                    let score = |i: usize| coeffs[i].abs() * (dist[i] / rho).max(1.0);
                    score(i).total_cmp(&score(k))
                })
                .expect("d > 0");
            values[j + 1] = fx;
            points[j + 1] = x;
        }
        if poor_step {
            if rho <= opts.rho_end {
                converged = true;
                break;
            }
            rho = (rho * 0.5).max(opts.rho_end);
        }
    }

    Ok(CobylaOutcome {
        x: best.0,
        value: -best.1,
        evaluations,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CobylaResult {
    pub params: QaoaParams,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// COBYLA over the `2p` angles of `init`.
pub fn cobyla_optimize(
    mut objective: impl FnMut(&QaoaParams) -> f64,
    init: &QaoaParams,
    opts: &CobylaOptions,
) -> Result<CobylaResult> {
    let out = cobyla_maximize(
        |x| objective(&QaoaParams::from_flat(x).expect("even, finite vector")),
        &init.to_flat(),
        opts,
    )?;
    Ok(CobylaResult {
        params: QaoaParams::from_flat(&out.x)?,
        value: out.value,
        evaluations: out.evaluations,
        converged: out.converged,
    })
}

/// FOURIER[q, R = 0] coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn fourier_arg(k: usize, i: usize, p: usize) -> f64 {
    (k as f64 + 0.5) * (i as f64 + 0.5) * PI / p as f64
}

impl FourierCoeffs {
    pub fn q(&self) -> usize {
        self.u.len()
    }

    /// `γ_i = Σ_k u_k sin((k-½)(i-½)π/p)`, `β_i = Σ_k v_k cos((k-½)(i-½)π/p)`
    /// (1-based `i`, `k`).
    pub fn to_params(&self, p: usize) -> Result<QaoaParams> {
        if self.q() > p || self.u.len() != self.v.len() {
            return Err(Error::InvalidInput(format!(
                "cannot expand q = {} coefficients to p = {p}",
                self.q()
            )));
        }
        let gamma = (0..p)
            .map(|i| (0..self.q()).map(|k| self.u[k] * fourier_arg(k, i, p).sin()).sum())
            .collect();
        let beta = (0..p)
            .map(|i| (0..self.q()).map(|k| self.v[k] * fourier_arg(k, i, p).cos()).sum())
            .collect();
        QaoaParams::new(gamma, beta)
    }

    /// Inverse of [`Self::to_params`] with `q = p`. The sine and cosine
    /// matrices are DST-IV / DCT-IV and satisfy `S Sᵀ = (p/2) I`.
    pub fn from_params(params: &QaoaParams) -> Self {
        let p = params.p();
        let scale = 2.0 / p as f64;
        let u = (0..p)
            .map(|k| scale * (0..p).map(|i| params.gamma()[i] * fourier_arg(k, i, p).sin()).sum::<f64>())
            .collect();
        let v = (0..p)
            .map(|k| scale * (0..p).map(|i| params.beta()[i] * fourier_arg(k, i, p).cos()).sum::<f64>())
            .collect();
        Self { u, v }
    }

    fn flat(&self) -> Vec<f64> {
        self.u.iter().chain(&self.v).copied().collect()
    }

    fn from_flat(x: &[f64]) -> Self {
        let q = x.len() / 2;
        Self {
            u: x[..q].to_vec(),
            v: x[q..].to_vec(),
        }
    }
}

/// FOURIER ladder from `p = 1` to `p_target`.
///
/// Depth 1 comes from [`multistart_with_evaluator`]. Each deeper level runs a
/// Newton ascent in coefficient space from two warm starts, keeping the
/// better: the previous coefficients padded with a zero frequency, and the
/// previous optimum with an appended identity layer (`γ = β = 0`), which
/// reproduces the previous value exactly. The second start makes the ratio
/// ladder non-decreasing.
pub fn fourier_optimize(
    g: &WeightedGraph,
    p_target: usize,
    opts: &MultistartOptions,
    rng_seed: u64,
) -> Result<Vec<OptimizeResult>> {
    let eval = QaoaEvaluator::new(g)?;
    fourier_with_evaluator(&eval, p_target, opts, rng_seed)
}

pub fn fourier_with_evaluator(
    eval: &QaoaEvaluator,
    p_target: usize,
    opts: &MultistartOptions,
    rng_seed: u64,
) -> Result<Vec<OptimizeResult>> {
    if p_target < 1 {
        return Err(Error::InvalidInput("layer count p must be at least 1".into()));
    }
    let optimum = eval.optimum()?;
    let first = multistart_with_evaluator(eval, 1, opts, rng_seed)?;
    let mut ladder = vec![first];
    for p in 2..=p_target {
        let prev = ladder.last().expect("ladder starts at p = 1");
        let mut padded = FourierCoeffs::from_params(&prev.params);
        padded.u.push(0.0);
        padded.v.push(0.0);
        let mut gamma = prev.params.gamma().to_vec();
        let mut beta = prev.params.beta().to_vec();
        gamma.push(0.0);
        beta.push(0.0);
        let extended = FourierCoeffs::from_params(&QaoaParams::new(gamma, beta)?);

        let objective = |x: &[f64]| {
            let params = FourierCoeffs::from_flat(x)
                .to_params(p)
                .expect("q = p by construction");
            eval.expectation(&params).expect("dimensions fixed")
        };
        let outcomes: Vec<AscentOutcome> = [padded.flat(), extended.flat()]
            .par_iter()
            .map(|x0| newton_ascent(objective, x0, &opts.newton))
            .collect();
        let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
        let best = outcomes
            .into_iter()
            .reduce(|a, b| if b.value > a.value { b } else { a })
            .expect("two starts");
        let params = FourierCoeffs::from_flat(&best.x).to_params(p)?;
        ladder.push(OptimizeResult {
            value: best.value,
            ratio: best.value / optimum,
            params,
            evaluations,
            starts_used: 2,
            converged: best.converged,
        });
    }
    Ok(ladder)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_concave_quadratic_maximum() {
        let f = |x: &[f64]| -(x[0] - 1.0).powi(2) - 2.0 * (x[1] + 0.5).powi(2) + 0.3 * x[0] * x[1];
        let out = newton_ascent(f, &[4.0, 4.0], &NewtonOptions::default());
        assert!(out.converged);
        let g = fd_gradient(f, &out.x, 1e-5);
        assert!(g.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn newton_never_decreases() {
        // non-concave: sin landscape
        let f = |x: &[f64]| x[0].sin() * x[1].cos() + 0.1 * x[0];
        let x0 = [2.5, 0.4];
        let out = newton_ascent(f, &x0, &NewtonOptions::default());
        assert!(out.value >= f(&x0));
    }

    #[test]
    fn cobyla_on_concave_quadratic() {
        // maximum 3 at (0.7, -1.2)
        let f = |x: &[f64]| 3.0 - (x[0] - 0.7).powi(2) - 0.5 * (x[1] + 1.2).powi(2);
        let out = cobyla_maximize(f, &[-2.0, 2.0], &CobylaOptions { budget: 200, ..Default::default() }).unwrap();
        assert!(out.evaluations <= 200);
        assert!((out.value - 3.0).abs() < 1e-4, "value {}", out.value);
        assert_eq!(out.value, f(&out.x));
    }

    #[test]
    fn cobyla_budget_flags_non_convergence() {
        let f = |x: &[f64]| -(x[0] - 10.0).powi(2) - x[1].powi(2);
        let out = cobyla_maximize(f, &[0.0, 0.0], &CobylaOptions { budget: 8, ..Default::default() }).unwrap();
        assert!(!out.converged);
        assert!(out.evaluations <= 8);
        assert!(cobyla_maximize(f, &[0.0, 0.0], &CobylaOptions { budget: 3, ..Default::default() }).is_err());
    }

    #[test]
    fn fourier_round_trip() {
        let params = QaoaParams::new(vec![0.1, 0.5, 0.9, 1.2], vec![0.7, 0.4, 0.3, 0.1]).unwrap();
        let back = FourierCoeffs::from_params(&params).to_params(4).unwrap();
        for (a, b) in params.to_flat().iter().zip(back.to_flat()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_p1_is_a_rescaling() {
        let c = FourierCoeffs { u: vec![2.0], v: vec![1.0] };
        let params = c.to_params(1).unwrap();
        let s = std::f64::consts::FRAC_PI_4.sin();
        assert!((params.gamma()[0] - 2.0 * s).abs() < 1e-15);
        assert!((params.beta()[0] - s).abs() < 1e-15);
        assert!(c.to_params(0).is_err());
    }

    #[test]
    fn zero_layer_start_reproduces_previous_value() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 0.8), (0, 2, 0.4)]).unwrap();
        let eval = QaoaEvaluator::new(&g).unwrap();
        let params = QaoaParams::new(vec![0.6, 0.2], vec![0.4, 0.3]).unwrap();
        let ext = QaoaParams::new(vec![0.6, 0.2, 0.0], vec![0.4, 0.3, 0.0]).unwrap();
        let coeffs = FourierCoeffs::from_params(&ext);
        let a = eval.expectation(&params).unwrap();
        let b = eval.expectation(&coeffs.to_params(3).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn multistart_rejects_p0() {
        let g = WeightedGraph::complete(3);
        assert!(multistart_optimize(&g, 0, &MultistartOptions::default(), 1).is_err());
    }

    #[test]
    fn default_start_schedule() {
        assert_eq!(default_start_count(&WeightedGraph::complete(10), 1), 55);
        assert_eq!(default_start_count(&WeightedGraph::complete(10), 3), 165);
        assert_eq!(default_start_count(&WeightedGraph::complete(10), 4), 200);
    }

    #[test]
    fn nested_start_sets() {
        let a = draw_starts(2, 3, 42);
        let b = draw_starts(2, 6, 42);
        assert_eq!(a[..], b[..3]);
        assert!(a.iter().flatten().all(|&x| (0.0..TAU).contains(&x)));
        assert!(a.iter().all(|s| s[2..].iter().all(|&b| (0.0..PI).contains(&b))));
    }

    #[test]
    fn single_edge_reaches_one() {
        let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
        let r = multistart_optimize(&g, 1, &MultistartOptions::default(), 0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!((r.ratio - 1.0).abs() < 1e-6);
        // maxima sit where sin γ · sin 4β = 1
        let (gm, bt) = (r.params.gamma()[0], r.params.beta()[0]);
        assert!((gm.sin() * (4.0 * bt).sin() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn complete_graph_ladder() {
        let g = WeightedGraph::complete(10);
        let opts = MultistartOptions {
            n_starts: Some(20),
            ..Default::default()
        };
        let expected = [0.9804, 0.9977, 0.9999];
        for (p, want) in (1..=3).zip(expected) {
            let r = multistart_optimize(&g, p, &opts, 5).unwrap();
            assert!((r.ratio - want).abs() < 0.005, "p={p}: {}", r.ratio);
        }
    }

    #[test]
    fn fourier_matches_multistart_and_is_monotone() {
        let g = WeightedGraph::new(
            6,
            [(0, 1, 1.0), (1, 2, 0.3), (2, 3, 0.9), (3, 4, 0.6), (4, 5, 0.2), (0, 5, 0.7), (1, 4, 0.5), (0, 3, 0.4)],
        )
        .unwrap();
        let opts = MultistartOptions::default();
        let ladder = fourier_optimize(&g, 4, &opts, 9).unwrap();
        let direct = multistart_optimize(&g, 1, &opts, 9).unwrap();
        assert!((ladder[0].value - direct.value).abs() < 1e-3);
        for w in ladder.windows(2) {
            assert!(w[1].ratio >= w[0].ratio - 1e-6);
        }
        assert_eq!(ladder[3].params.p(), 4);
    }
}
