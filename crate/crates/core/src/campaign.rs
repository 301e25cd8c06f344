//! Desk-scale experiment drivers: transferred versus random parameters,
//! transferred QAOA versus Goemans-Williamson, and depolarizing noise.
//!
//! Every campaign derives all of its randomness from one `seed`, so its
//! output is a function of the configuration alone (apart from wall times).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_test_suite, SuiteOptions, WeightedGraph};
use crate::gw::{gw_baseline, ratio_bin, HISTOGRAM_BINS};
use crate::io::{Method, ResultRow};
use crate::noise::{
    noisy_expectation, run_noisy_qaoa_density, run_noisy_qaoa_trajectories, sample_density, NoiseModel,
};
use crate::optimize::{cobyla_optimize, multistart_with_evaluator, CobylaOptions, MultistartOptions};
use crate::simulator::{estimate_from_samples, sample, QaoaEvaluator, QaoaParams, QUICK_SHOTS};
use crate::sub_seed;
use crate::transfer::{build_database, build_mapping_table, select_params, BuildOptions, Database, SelectionPolicy};

/// Shot count switch: 2048 shots for quick runs, 2^19 for campaign runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fidelity {
    Quick,
    Campaign,
}

impl Fidelity {
    pub fn shots(self) -> u64 {
        match self {
            Fidelity::Quick => QUICK_SHOTS,
            Fidelity::Campaign => crate::simulator::CAMPAIGN_SHOTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeskConfig {
    /// Seed graph size.
    pub n_s: usize,
    pub n_seeds: usize,
    /// Target graph size.
    pub n_t: usize,
    /// Targets that form the mapping-table columns.
    pub n_table_targets: usize,
    /// Held-out targets the transfer is evaluated on.
    pub n_targets: usize,
    pub weighted: bool,
    pub p_list: Vec<usize>,
    pub multistart: MultistartOptions,
    pub seed: u64,
    /// Journal timestamp for the database built here.
    pub timestamp: u64,
}

impl Default for DeskConfig {
    fn default() -> Self {
        Self {
            n_s: 8,
            n_seeds: 7,
            n_t: 12,
            n_table_targets: 20,
            n_targets: 60,
            weighted: true,
            p_list: vec![1, 2, 3],
            multistart: MultistartOptions::default(),
            seed: 2024,
            timestamp: 0,
        }
    }
}

/// Seeds, mapping tables and evaluation targets for one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Desk {
    pub config: DeskConfig,
    pub db: Database,
    pub targets: Vec<(String, WeightedGraph)>,
    pub warnings: Vec<String>,
}

fn named(prefix: &str, graphs: Vec<WeightedGraph>) -> Vec<(String, WeightedGraph)> {
    graphs
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("{prefix}-{i:03}"), g))
        .collect()
}

/// Generates seeds, table targets and evaluation targets from independent
/// sub-streams of `cfg.seed`, optimizes the seeds and builds one mapping table
/// per depth.
pub fn prepare_desk(cfg: &DeskConfig) -> Result<Desk> {
    let suite = |count, n, stream| generate_test_suite(count, n, cfg.weighted, sub_seed(cfg.seed, stream), SuiteOptions::default());
    let seeds = named(&format!("s{}", cfg.n_s), suite(cfg.n_seeds, cfg.n_s, 0)?);
    let columns = named(&format!("c{}", cfg.n_t), suite(cfg.n_table_targets, cfg.n_t, 1)?);
    let targets = named(&format!("t{}", cfg.n_t), suite(cfg.n_targets, cfg.n_t, 2)?);

    let report = build_database(
        &seeds,
        &cfg.p_list,
        &BuildOptions {
            multistart: cfg.multistart,
            rng_seed: sub_seed(cfg.seed, 3),
        },
    );
    if let Some((r, p, msg)) = report.failures.first() {
        return Err(Error::Numeric(format!("seed optimization failed for {r} at p = {p}: {msg}")));
    }
    let mut db = Database {
        records: report.records,
        ..Default::default()
    };
    for (r, g) in seeds.iter().chain(&columns) {
        db.graphs.insert(r.clone(), g.clone());
    }
    db.log(
        cfg.timestamp,
        "build_database",
        format!("seeds={} p={:?} seed={}", seeds.len(), cfg.p_list, cfg.seed),
    );
    for &p in &cfg.p_list {
        let table = build_mapping_table(&db.records_for(cfg.n_s, p), &columns)?;
        db.tables.push(table);
        db.log(
            cfg.timestamp,
            "build_table",
            format!("p={p} n_s={} n_t={} columns={}", cfg.n_s, cfg.n_t, columns.len()),
        );
    }
    Ok(Desk {
        config: cfg.clone(),
        db,
        targets,
        warnings: report.warnings,
    })
}

/// Best-scoring transferred parameters for `target` from the `(p, n_s, n_t)` table.
pub fn transferred_params(
    db: &Database,
    p: usize,
    n_s: usize,
    target: &WeightedGraph,
    policy: &SelectionPolicy,
) -> Result<(QaoaParams, crate::transfer::TransferSelection)> {
    let table = db.table(p, n_s, target.n()).ok_or_else(|| {
        Error::InvalidInput(format!("database has no table for p = {p}, n_s = {n_s}, n_t = {}", target.n()))
    })?;
    let sel = select_params(table, &db.records, target.density()?, policy)?;
    Ok((sel.records[0].params()?, sel))
}

/// Exact ratio and sampled best ratio of `params` on the evaluator's graph.
fn score(eval: &QaoaEvaluator, optimum: f64, params: &QaoaParams, shots: u64, seed: u64) -> Result<(f64, f64)> {
    let state = eval.state(params)?;
    let mean = eval.expectation_of_state(&state)? / optimum;
    let est = estimate_from_samples(&sample(&state, shots, seed)?, eval.graph())?;
    Ok((mean, est.best_value / optimum))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub params: QaoaParams,
    /// Exact ratio at the starting parameters.
    pub start_ratio: f64,
    /// Exact ratio at the refined parameters.
    pub final_ratio: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// COBYLA on the sampled mean ratio (`shots` shots per evaluation, a fresh
/// sub-stream of `seed` each time), reporting exact ratios before and after.
pub fn refine(
    eval: &QaoaEvaluator,
    start: &QaoaParams,
    budget: usize,
    shots: u64,
    seed: u64,
) -> Result<Refinement> {
    let optimum = eval.optimum()?;
    let mut calls = 0u64;
    let mut failure = None;
    let out = cobyla_optimize(
        |params| {
            calls += 1;
            let sampled = eval
                .state(params)
                .and_then(|s| sample(&s, shots, sub_seed(seed, calls)))
                .and_then(|d| estimate_from_samples(&d, eval.graph()));
            match sampled {
                Ok(est) => est.mean / optimum,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        start,
        &CobylaOptions {
            budget,
            ..Default::default()
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Refinement {
        start_ratio: eval.expectation(start)? / optimum,
        final_ratio: eval.expectation(&out.params)? / optimum,
        params: out.params,
        evaluations: out.evaluations,
        converged: out.converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomVsTransferConfig {
    pub desk: DeskConfig,
    /// Uniform parameter draws per target and depth.
    pub random_draws: usize,
    pub shots: u64,
    pub policy: SelectionPolicy,
    /// COBYLA budget for the refinement study; `None` skips it.
    pub refine_budget: Option<usize>,
    /// Targets below this density form the low-density subset.
    pub low_density: f64,
    /// When false, wall times are written as zero so output files are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for RandomVsTransferConfig {
    fn default() -> Self {
        Self {
            desk: DeskConfig::default(),
            random_draws: 10,
            shots: QUICK_SHOTS,
            policy: SelectionPolicy::default(),
            refine_budget: Some(100),
            low_density: 0.3,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResult {
    pub graph_ref: String,
    pub density: f64,
    pub p: usize,
    pub transfer_ratio: f64,
    pub random_ratio: f64,
    /// COBYLA from the transferred (best-row) parameters.
    pub refine_best: Option<Refinement>,
    /// COBYLA from the worst row of the same table column.
    pub refine_worst: Option<Refinement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSummary {
    pub p: usize,
    pub targets: usize,
    pub transfer_mean: f64,
    pub random_mean: f64,
    pub low_targets: usize,
    pub low_transfer_mean: f64,
    pub low_random_mean: f64,
    /// Mean exact-ratio gain of refinement from the transferred parameters.
    pub refine_gain_best: Option<f64>,
    /// Mean exact-ratio gain of refinement from the worst table row.
    pub refine_gain_worst: Option<f64>,
}

impl DepthSummary {
    pub fn margin(&self) -> f64 {
        self.transfer_mean - self.random_mean
    }

    pub fn low_margin(&self) -> f64 {
        self.low_transfer_mean - self.low_random_mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomVsTransferReport {
    pub rows: Vec<ResultRow>,
    pub targets: Vec<TargetResult>,
    pub summaries: Vec<DepthSummary>,
    pub desk: Desk,
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = v.into_iter().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

fn seconds(start: Instant, record: bool) -> f64 {
    if record {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    }
}

pub fn random_vs_transfer(cfg: &RandomVsTransferConfig) -> Result<RandomVsTransferReport> {
    let desk = prepare_desk(&cfg.desk)?;
    random_vs_transfer_on(desk, cfg)
}

/// Runs the comparison on an existing desk.
pub fn random_vs_transfer_on(desk: Desk, cfg: &RandomVsTransferConfig) -> Result<RandomVsTransferReport> {
    let dc = &desk.config;
    let work: Vec<(usize, usize)> = (0..desk.targets.len())
        .flat_map(|t| dc.p_list.iter().map(move |&p| (t, p)))
        .collect();
    let results: Vec<(TargetResult, Vec<ResultRow>)> = work
        .par_iter()
        .map(|&(t, p)| {
            let (graph_ref, g) = &desk.targets[t];
            let eval = QaoaEvaluator::new(g)?;
            let optimum = eval.optimum()?;
            let density = g.density()?;
            let seed = sub_seed(sub_seed(dc.seed, 100 + t as u64), p as u64);
            let row = |method, mean_ratio, best_ratio, seed, wall_time| ResultRow {
                graph_ref: graph_ref.clone(),
                density,
                p,
                method,
                mean_ratio,
                best_ratio,
                shots: cfg.shots,
                seed,
                wall_time,
            };
            let mut rows = Vec::new();

            let clock = Instant::now();
            let (params, sel) = transferred_params(&desk.db, p, dc.n_s, g, &cfg.policy)?;
            let (transfer_ratio, transfer_best) = score(&eval, optimum, &params, cfg.shots, sub_seed(seed, 0))?;
            rows.push(row(Method::Transfer, transfer_ratio, transfer_best, seed, seconds(clock, cfg.record_timing)));

            let clock = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 1));
            let mut random = Vec::with_capacity(cfg.random_draws);
            for d in 0..cfg.random_draws {
                let gamma = (0..p).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
                let beta = (0..p).map(|_| rng.random::<f64>() * std::f64::consts::PI).collect();
                let params = QaoaParams::new(gamma, beta)?;
                random.push(score(&eval, optimum, &params, cfg.shots, sub_seed(seed, 10 + d as u64))?);
            }
            let random_ratio = mean(random.iter().map(|r| r.0));
            let random_best = random.iter().map(|r| r.1).fold(0.0, f64::max);
            rows.push(row(Method::Random, random_ratio, random_best, seed, seconds(clock, cfg.record_timing)));

            let (mut refine_best, mut refine_worst) = (None, None);
            if let Some(budget) = cfg.refine_budget {
                let clock = Instant::now();
                let best = refine(&eval, &params, budget, cfg.shots, sub_seed(seed, 2))?;
                let (_, best_sampled) = score(&eval, optimum, &best.params, cfg.shots, sub_seed(seed, 3))?;
                rows.push(row(
                    Method::TransferRefine,
                    best.final_ratio,
                    best_sampled,
                    seed,
                    seconds(clock, cfg.record_timing),
                ));
                let table = desk.db.table(p, dc.n_s, dc.n_t).expect("table used for selection");
                let col = table.col_index(&sel.columns[0]).expect("selected column exists");
                let worst_ref = &table.row_refs[table.worst_row(col).expect("non-empty table")];
                let worst_params = desk
                    .db
                    .record(worst_ref, p)
                    .ok_or_else(|| Error::InvalidInput(format!("table row {worst_ref} has no record")))?
                    .params()?;
                refine_worst = Some(refine(&eval, &worst_params, budget, cfg.shots, sub_seed(seed, 4))?);
                refine_best = Some(best);
            }
            Ok((
                TargetResult {
                    graph_ref: graph_ref.clone(),
                    density,
                    p,
                    transfer_ratio,
                    random_ratio,
                    refine_best,
                    refine_worst,
                },
                rows,
            ))
        })
        .collect::<Result<_>>()?;

    let (targets, rows): (Vec<TargetResult>, Vec<Vec<ResultRow>>) = results.into_iter().unzip();
    let summaries = dc
        .p_list
        .iter()
        .map(|&p| {
            let at: Vec<&TargetResult> = targets.iter().filter(|t| t.p == p).collect();
            let low: Vec<&&TargetResult> = at.iter().filter(|t| t.density < cfg.low_density).collect();
            let gain = |pick: fn(&TargetResult) -> Option<&Refinement>| {
                let gains: Vec<f64> = at.iter().filter_map(|t| pick(t)).map(|r| r.final_ratio - r.start_ratio).collect();
                (!gains.is_empty()).then(|| mean(gains))
            };
            DepthSummary {
                p,
                targets: at.len(),
                transfer_mean: mean(at.iter().map(|t| t.transfer_ratio)),
                random_mean: mean(at.iter().map(|t| t.random_ratio)),
                low_targets: low.len(),
                low_transfer_mean: mean(low.iter().map(|t| t.transfer_ratio)),
                low_random_mean: mean(low.iter().map(|t| t.random_ratio)),
                refine_gain_best: gain(|t| t.refine_best.as_ref()),
                refine_gain_worst: gain(|t| t.refine_worst.as_ref()),
            }
        })
        .collect();
    Ok(RandomVsTransferReport {
        rows: rows.into_iter().flatten().collect(),
        targets,
        summaries,
        desk,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwCompareConfig {
    pub desk: DeskConfig,
    pub n_cuts: usize,
    pub shots: u64,
    pub policy: SelectionPolicy,
    pub record_timing: bool,
}

impl Default for GwCompareConfig {
    fn default() -> Self {
        Self {
            desk: DeskConfig {
                n_targets: 100,
                p_list: vec![1, 2, 3, 10],
                ..DeskConfig::default()
            },
            n_cuts: crate::gw::DEFAULT_CUTS,
            shots: QUICK_SHOTS,
            policy: SelectionPolicy::default(),
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwTargetResult {
    pub graph_ref: String,
    pub density: f64,
    pub gw_mean: f64,
    pub gw_max: f64,
    pub sdp_objective: f64,
    pub optimum: f64,
    /// `(p, exact transferred ratio)`.
    pub qaoa: Vec<(usize, f64)>,
}

/// Position of the best rows in the lowest- and highest-density columns of
/// one mapping table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableStructure {
    pub p: usize,
    pub rows: usize,
    /// Best row of the lowest-density column (0 is the lowest-density seed).
    pub lowest_column_best_row: usize,
    /// Best row of the highest-density column.
    pub densest_column_best_row: usize,
}

impl TableStructure {
    pub fn lowest_seed_wins_lowest_column(&self) -> bool {
        self.lowest_column_best_row == 0
    }

    /// Best row for the densest column lies in the upper half of seed densities.
    pub fn dense_seeds_win_densest_column(&self) -> bool {
        2 * self.densest_column_best_row >= self.rows.saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwCompareReport {
    pub rows: Vec<ResultRow>,
    pub targets: Vec<GwTargetResult>,
    /// `(p, targets where transferred QAOA beats the GW mean)`.
    pub beats: Vec<(usize, usize)>,
    pub structure: Vec<TableStructure>,
    /// `(p, pooled histogram of sampled QAOA cut ratios)`.
    pub qaoa_histograms: Vec<(usize, Vec<u64>)>,
    /// Pooled histogram of GW cut ratios.
    pub gw_histogram: Vec<u64>,
    pub desk: Desk,
}

pub fn gw_compare(cfg: &GwCompareConfig) -> Result<GwCompareReport> {
    let desk = prepare_desk(&cfg.desk)?;
    gw_compare_on(desk, cfg)
}

pub fn gw_compare_on(desk: Desk, cfg: &GwCompareConfig) -> Result<GwCompareReport> {
    let dc = &desk.config;
    struct PerTarget {
        result: GwTargetResult,
        rows: Vec<ResultRow>,
        qaoa_hist: Vec<Vec<u64>>,
        gw_hist: Vec<u64>,
    }
    let per: Vec<PerTarget> = desk
        .targets
        .par_iter()
        .enumerate()
        .map(|(t, (graph_ref, g))| {
            let seed = sub_seed(dc.seed, 100 + t as u64);
            let density = g.density()?;
            let eval = QaoaEvaluator::new(g)?;
            let mut rows = Vec::new();

            let clock = Instant::now();
            let gw = gw_baseline(g, cfg.n_cuts, sub_seed(seed, 50))?;
            let mut gw_hist = gw.distribution.histogram.clone();
            gw_hist.resize(HISTOGRAM_BINS, 0);
            rows.push(ResultRow {
                graph_ref: graph_ref.clone(),
                density,
                p: 0,
                method: Method::Gw,
                mean_ratio: gw.distribution.mean,
                best_ratio: gw.distribution.max,
                shots: cfg.n_cuts as u64,
                seed: sub_seed(seed, 50),
                wall_time: seconds(clock, cfg.record_timing),
            });

            let mut qaoa = Vec::new();
            let mut qaoa_hist = Vec::new();
            for &p in &dc.p_list {
                let clock = Instant::now();
                let (params, _) = transferred_params(&desk.db, p, dc.n_s, g, &cfg.policy)?;
                let state = eval.state(&params)?;
                let ratio = eval.expectation_of_state(&state)? / gw.optimum;
                let shot_seed = sub_seed(seed, p as u64);
                let dist = sample(&state, cfg.shots, shot_seed)?;
                let mut hist = vec![0u64; HISTOGRAM_BINS];
                for (&k, &c) in &dist.counts {
                    hist[ratio_bin(eval.cut(k) / gw.optimum)] += c;
                }
                let best = estimate_from_samples(&dist, g)?.best_value / gw.optimum;
                rows.push(ResultRow {
                    graph_ref: graph_ref.clone(),
                    density,
                    p,
                    method: Method::Transfer,
                    mean_ratio: ratio,
                    best_ratio: best,
                    shots: cfg.shots,
                    seed: shot_seed,
                    wall_time: seconds(clock, cfg.record_timing),
                });
                qaoa.push((p, ratio));
                qaoa_hist.push(hist);
            }
            Ok(PerTarget {
                result: GwTargetResult {
                    graph_ref: graph_ref.clone(),
                    density,
                    gw_mean: gw.distribution.mean,
                    gw_max: gw.distribution.max,
                    sdp_objective: gw.sdp_objective,
                    optimum: gw.optimum,
                    qaoa,
                },
                rows,
                qaoa_hist,
                gw_hist,
            })
        })
        .collect::<Result<_>>()?;

    let beats = dc
        .p_list
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, per.iter().filter(|t| t.result.qaoa[k].1 > t.result.gw_mean).count()))
        .collect();
    let mut qaoa_histograms: Vec<(usize, Vec<u64>)> = dc.p_list.iter().map(|&p| (p, vec![0; HISTOGRAM_BINS])).collect();
    let mut gw_histogram = vec![0u64; HISTOGRAM_BINS];
    for t in &per {
        for (k, h) in t.qaoa_hist.iter().enumerate() {
            qaoa_histograms[k].1.iter_mut().zip(h).for_each(|(a, b)| *a += b);
        }
        gw_histogram.iter_mut().zip(&t.gw_hist).for_each(|(a, b)| *a += b);
    }
    let structure = desk
        .db
        .tables
        .iter()
        .map(|table| TableStructure {
            p: table.p,
            rows: table.n_rows(),
            lowest_column_best_row: table.best_row(0).expect("non-empty table"),
            densest_column_best_row: table.best_row(table.n_cols() - 1).expect("non-empty table"),
        })
        .collect();
    let (targets, rows): (Vec<_>, Vec<_>) = per.into_iter().map(|t| (t.result, t.rows)).unzip();
    Ok(GwCompareReport {
        rows: rows.into_iter().flatten().collect(),
        targets,
        beats,
        structure,
        qaoa_histograms,
        gw_histogram,
        desk,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub n: usize,
    pub p: usize,
    pub n_graphs: usize,
    pub models: Vec<(String, NoiseModel)>,
    pub shots: u64,
    pub multistart: MultistartOptions,
    /// Graph size for the density-matrix versus trajectory comparison.
    pub check_n: usize,
    pub check_graphs: usize,
    pub check_trajectories: usize,
    pub seed: u64,
    pub record_timing: bool,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            n: 8,
            p: 3,
            n_graphs: 10,
            models: vec![("I".into(), NoiseModel::MODEL_I), ("II".into(), NoiseModel::MODEL_II)],
            shots: QUICK_SHOTS,
            multistart: MultistartOptions::default(),
            check_n: 6,
            check_graphs: 4,
            check_trajectories: 400,
            seed: 2024,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseGraphResult {
    pub graph_ref: String,
    pub density: f64,
    pub noiseless_ratio: f64,
    /// Exact density-matrix ratio per model, in configuration order.
    pub model_ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorCheck {
    pub graph_ref: String,
    pub model: String,
    pub density_matrix: f64,
    pub trajectory_mean: f64,
    pub trajectory_se: f64,
}

impl EstimatorCheck {
    pub fn z(&self) -> f64 {
        (self.density_matrix - self.trajectory_mean).abs() / self.trajectory_se
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub rows: Vec<ResultRow>,
    pub graphs: Vec<NoiseGraphResult>,
    pub model_names: Vec<String>,
    pub noiseless_mean: f64,
    pub model_means: Vec<f64>,
    pub checks: Vec<EstimatorCheck>,
}

impl NoiseReport {
    /// Noiseless mean ratio minus the model's mean ratio.
    pub fn degradation(&self, model: usize) -> f64 {
        self.noiseless_mean - self.model_means[model]
    }
}

/// Optimizes each graph noiselessly, then evaluates the optimum under every
/// noise model with the exact density-matrix simulator. A smaller set of
/// graphs cross-checks the density-matrix and trajectory estimators.
pub fn noise_campaign(cfg: &NoiseConfig) -> Result<NoiseReport> {
    let suite = |count, n, stream| generate_test_suite(count, n, true, sub_seed(cfg.seed, stream), SuiteOptions::default());
    let graphs = named(&format!("n{}", cfg.n), suite(cfg.n_graphs, cfg.n, 0)?);
    let per: Vec<(NoiseGraphResult, Vec<ResultRow>)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, (graph_ref, g))| {
            let eval = QaoaEvaluator::new(g)?;
            let opt = multistart_with_evaluator(&eval, cfg.p, &cfg.multistart, sub_seed(cfg.seed, 100 + i as u64))?;
            let optimum = eval.optimum()?;
            let density = g.density()?;
            let mut rows = Vec::new();
            let mut model_ratios = Vec::new();
            for (m, (name, model)) in cfg.models.iter().enumerate() {
                let clock = Instant::now();
                let rho = run_noisy_qaoa_density(g, &opt.params, *model)?;
                let ratio = noisy_expectation(&rho, g)? / optimum;
                let shot_seed = sub_seed(cfg.seed, 1000 * (i as u64 + 1) + m as u64);
                let best = estimate_from_samples(&sample_density(&rho, cfg.shots, shot_seed)?, g)?.best_value / optimum;
                rows.push(ResultRow {
                    // The row format has no model column, so the model rides on the reference.
                    graph_ref: format!("{graph_ref}/{name}"),
                    density,
                    p: cfg.p,
                    method: Method::Noisy,
                    mean_ratio: ratio,
                    best_ratio: best,
                    shots: cfg.shots,
                    seed: shot_seed,
                    wall_time: seconds(clock, cfg.record_timing),
                });
                model_ratios.push(ratio);
            }
            Ok((
                NoiseGraphResult {
                    graph_ref: graph_ref.clone(),
                    density,
                    noiseless_ratio: opt.ratio,
                    model_ratios,
                },
                rows,
            ))
        })
        .collect::<Result<_>>()?;

    let small = named(&format!("n{}", cfg.check_n), suite(cfg.check_graphs, cfg.check_n, 1)?);
    let checks: Vec<EstimatorCheck> = small
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (graph_ref, g))| {
            cfg.models.iter().enumerate().map(move |(m, (name, model))| {
                let eval = QaoaEvaluator::new(g)?;
                let opt = multistart_with_evaluator(&eval, cfg.p, &cfg.multistart, sub_seed(cfg.seed, 500 + i as u64))?;
                let rho = run_noisy_qaoa_density(g, &opt.params, *model)?;
                let traj = run_noisy_qaoa_trajectories(
                    g,
                    &opt.params,
                    *model,
                    cfg.check_trajectories,
                    cfg.check_trajectories as u64,
                    sub_seed(cfg.seed, 5000 + 10 * i as u64 + m as u64),
                )?;
                Ok(EstimatorCheck {
                    graph_ref: graph_ref.clone(),
                    model: name.clone(),
                    density_matrix: noisy_expectation(&rho, g)?,
                    trajectory_mean: traj.mean(),
                    trajectory_se: traj.standard_error(),
                })
            })
        })
        .collect::<Result<_>>()?;

    let (graphs, rows): (Vec<_>, Vec<_>) = per.into_iter().unzip();
    let noiseless_mean = mean(graphs.iter().map(|g: &NoiseGraphResult| g.noiseless_ratio));
    let model_means = (0..cfg.models.len())
        .map(|m| mean(graphs.iter().map(|g| g.model_ratios[m])))
        .collect();
    Ok(NoiseReport {
        rows: rows.into_iter().flatten().collect(),
        graphs,
        model_names: cfg.models.iter().map(|m| m.0.clone()).collect(),
        noiseless_mean,
        model_means,
        checks,
    })
}
