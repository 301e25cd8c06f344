use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use dqaoa::graph::{generate_test_suite, random_graph, GraphGenSpec, SuiteOptions, WeightedGraph};
use dqaoa::gw::gw_baseline;
use dqaoa::io::{
    read_case, read_database, read_graph, read_json, results_csv_string, write_database, write_graph,
    write_histogram_csv, write_ratio_histograms_csv, Method, ResultRow,
};
use dqaoa::maxcut::brute_force_maxcut;
use dqaoa::noise::{
    noisy_expectation, run_noisy_qaoa_density, run_noisy_qaoa_trajectories, sample_density, NoiseModel,
    DENSITY_QUBIT_CAP,
};
use dqaoa::optimize::{draw_starts, MultistartOptions};
use dqaoa::powerflow::{
    line_weights, power_balance_residual, solve_power_flow, PfOptions, PowerFlowCase, Scenario,
};
use dqaoa::simulator::{estimate_from_samples, sample, QaoaEvaluator, QaoaParams, SampleEstimate};
use dqaoa::transfer::{
    build_database, build_mapping_table, select_params, BuildOptions, Database, ExpandOutcome, ParamRecord,
    SelectionPolicy,
};
use dqaoa::{sub_seed, Error};
use serde_json::{json, Value};

use crate::{graph_ref, print_json, print_text, timestamp, write_text, CliError, CliResult, Global};

#[derive(Debug, Args)]
pub struct GenGraphs {
    /// Vertices per graph.
    #[arg(long)]
    n: usize,
    /// Number of graphs.
    #[arg(long)]
    count: usize,
    /// Uniform (0, 1] weights instead of unit weights.
    #[arg(long)]
    weighted: bool,
    /// Draw independent graphs with this edge-removal probability instead of
    /// a density-spanning non-planar suite.
    #[arg(long)]
    zero_prob: Option<f64>,
    /// Output directory; files are named `<prefix><index>.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "g")]
    prefix: String,
}

#[derive(Debug, Args)]
pub struct GraphOnly {
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeSeeds {
    /// Seed graph files; each file stem becomes the graph reference.
    #[arg(long, num_args = 1.., required = true)]
    graphs: Vec<PathBuf>,
    /// Depths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    p: Vec<usize>,
    /// Database file, created when missing.
    #[arg(long)]
    db: PathBuf,
    /// Multistart count (default min(200, p(n + m))).
    #[arg(long)]
    starts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BuildTable {
    #[arg(long)]
    db: PathBuf,
    /// Target graph files, all with the same vertex count.
    #[arg(long, num_args = 1.., required = true)]
    targets: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    p: Vec<usize>,
    /// Seed vertex count (inferred when the database has a single one).
    #[arg(long)]
    n_s: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Transfer {
    #[arg(long)]
    db: PathBuf,
    /// Target graph file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    p: usize,
    /// Seed vertex count (inferred when only one table fits).
    #[arg(long)]
    n_s: Option<usize>,
    /// Refine the transferred parameters with COBYLA on sampled ratios.
    #[arg(long)]
    refine: bool,
    /// COBYLA evaluation budget.
    #[arg(long, default_value_t = 100)]
    budget: usize,
    /// Store the final parameters in the database as a new seed record.
    #[arg(long)]
    add: bool,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Parameter JSON (`{"schema_version": 1, "gamma": [...], "beta": [...]}`).
    #[arg(long, conflicts_with_all = ["gamma", "beta"], required_unless_present_all = ["gamma", "beta"])]
    params: Option<PathBuf>,
    /// Cost angles, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "beta")]
    gamma: Option<Vec<f64>>,
    /// Mixer angles, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "gamma")]
    beta: Option<Vec<f64>>,
}

impl ParamsArgs {
    fn params(&self) -> CliResult<QaoaParams> {
        match (&self.params, &self.gamma, &self.beta) {
            (Some(path), _, _) => Ok(read_json(path)?),
            (None, Some(gamma), Some(beta)) => Ok(QaoaParams::new(gamma.clone(), beta.clone())?),
            _ => Err(CliError::Usage("pass --params or both --gamma and --beta".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunQaoa {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    params: ParamsArgs,
    /// Shot count (defaults to the fidelity setting).
    #[arg(long)]
    shots: Option<u64>,
    /// Write the outcome histogram as CSV.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoisyMethod {
    /// Exact density matrix (up to the qubit cap).
    Density,
    /// Monte Carlo trajectories.
    Traj,
}

#[derive(Debug, Args)]
pub struct RunNoisy {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    params: ParamsArgs,
    /// `I`, `II`, or `custom:<p1>,<p2>`.
    #[arg(long, default_value = "II")]
    noise_model: String,
    /// Defaults to density up to the qubit cap and trajectories above it.
    #[arg(long, value_enum)]
    method: Option<NoisyMethod>,
    /// Trajectory count.
    #[arg(long, default_value_t = 400)]
    traj: usize,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Gw {
    #[arg(long)]
    graph: PathBuf,
    /// Hyperplane cuts to draw.
    #[arg(long, default_value_t = dqaoa::gw::DEFAULT_CUTS)]
    cuts: usize,
    /// Write the ratio histogram as CSV.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Compare {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    db: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    p: Vec<usize>,
    #[arg(long)]
    n_s: Option<usize>,
    /// Random parameter draws averaged for the random baseline.
    #[arg(long, default_value_t = 10)]
    random_draws: usize,
    #[arg(long, default_value_t = dqaoa::gw::DEFAULT_CUTS)]
    cuts: usize,
    /// Result CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PfWeights {
    /// Case JSON; the shipped 24-bus sample when omitted.
    #[arg(long)]
    case: Option<PathBuf>,
    /// Scenario name from the case, or a JSON file with `{name, overrides}`.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum DbCommand {
    /// Add a seed record after re-deriving its ratio.
    Add(DbAdd),
    /// List records and tables.
    List(DbPath),
    /// Re-derive every stored ratio and check table invariants.
    Validate(DbPath),
}

#[derive(Debug, Args)]
pub struct DbPath {
    #[arg(long)]
    db: PathBuf,
}

#[derive(Debug, Args)]
pub struct DbAdd {
    #[arg(long)]
    db: PathBuf,
    /// Graph the parameters belong to.
    #[arg(long)]
    graph: PathBuf,
    /// Record JSON (`{n, density, p, gamma, beta, seed_ratio, graph_ref}`).
    #[arg(long, conflicts_with_all = ["gamma", "beta"])]
    record: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "beta")]
    gamma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "gamma")]
    beta: Option<Vec<f64>>,
}

fn open_db(path: &Path) -> CliResult<Database> {
    if path.exists() {
        Ok(read_database(path)?)
    } else {
        Ok(Database::default())
    }
}

fn best_cut_json(est: &SampleEstimate, optimum: f64) -> Value {
    json!({
        "bitstring": est.best_cut.bitstring(),
        "value": est.best_value,
        "ratio": est.best_value / optimum,
    })
}

fn outcome_name(o: ExpandOutcome) -> &'static str {
    match o {
        ExpandOutcome::Added => "added",
        ExpandOutcome::Replaced => "replaced",
        ExpandOutcome::Unchanged => "unchanged",
    }
}

pub fn gen_graphs(g: &Global, a: GenGraphs) -> CliResult {
    let graphs = match a.zero_prob {
        Some(zero_probability) => (0..a.count)
            .map(|i| {
                random_graph(&GraphGenSpec {
                    n: a.n,
                    zero_probability,
                    weighted: a.weighted,
                    rng_seed: sub_seed(g.seed, i as u64),
                })
            })
            .collect::<dqaoa::Result<Vec<_>>>()?,
        None => generate_test_suite(a.count, a.n, a.weighted, g.seed, SuiteOptions::default())?,
    };
    std::fs::create_dir_all(&a.out).map_err(|e| Error::Io {
        path: a.out.clone(),
        source: e,
    })?;
    let mut listing = Vec::new();
    for (i, graph) in graphs.iter().enumerate() {
        let path = a.out.join(format!("{}{i:03}.json", a.prefix));
        write_graph(&path, graph)?;
        listing.push(json!({
            "file": path.display().to_string(),
            "density": if graph.n() >= 2 { Some(graph.density()?) } else { None },
            "edges": graph.m(),
        }));
    }
    print_json(&json!({ "seed": g.seed, "graphs": listing }));
    Ok(())
}

pub fn maxcut_exact(a: GraphOnly) -> CliResult {
    let graph = read_graph(&a.graph)?;
    let sol = brute_force_maxcut(&graph)?;
    print_json(&json!({
        "n": graph.n(),
        "edges": graph.m(),
        "value": sol.value,
        "bitstring": sol.assignment.bitstring(),
    }));
    Ok(())
}

pub fn optimize_seeds(g: &Global, a: OptimizeSeeds) -> CliResult {
    let mut db = open_db(&a.db)?;
    let seeds: Vec<(String, WeightedGraph)> = a
        .graphs
        .iter()
        .map(|p| Ok((graph_ref(p), read_graph(p)?)))
        .collect::<CliResult<_>>()?;
    let report = build_database(
        &seeds,
        &a.p,
        &BuildOptions {
            multistart: MultistartOptions {
                n_starts: a.starts,
                ..Default::default()
            },
            rng_seed: g.seed,
        },
    );
    let ts = timestamp();
    let mut outcomes = Vec::new();
    for rec in report.records {
        let graph = &seeds.iter().find(|(r, _)| *r == rec.graph_ref).expect("record of a seed").1;
        let summary = json!({ "graph_ref": rec.graph_ref, "p": rec.p, "ratio": rec.seed_ratio });
        let outcome = db.add_record(rec, graph, ts)?;
        outcomes.push(json!({ "record": summary, "outcome": outcome_name(outcome) }));
    }
    write_database(&a.db, &db)?;
    print_json(&json!({ "records": outcomes, "warnings": report.warnings }));
    if let Some((r, p, msg)) = report.failures.first() {
        return Err(Error::Numeric(format!("optimization failed for {r} at p = {p}: {msg}")).into());
    }
    Ok(())
}

fn infer_n_s(db: &Database, p: usize, explicit: Option<usize>) -> CliResult<usize> {
    if let Some(n) = explicit {
        return Ok(n);
    }
    let mut sizes: Vec<usize> = db.records.iter().filter(|r| r.p == p).map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    match sizes.as_slice() {
        [n] => Ok(*n),
        [] => Err(Error::InvalidInput(format!("database has no seed records at p = {p}")).into()),
        _ => Err(CliError::Usage(format!("seed sizes {sizes:?} exist at p = {p}; pass --n-s"))),
    }
}

/// Seed size of the unique table at depth `p` whose targets have `n_t` vertices.
fn table_n_s(db: &Database, p: usize, n_t: usize, explicit: Option<usize>) -> CliResult<usize> {
    if let Some(n) = explicit {
        return Ok(n);
    }
    match db.tables_for_target(p, n_t).as_slice() {
        [t] => Ok(t.n_s),
        [] => Err(Error::InvalidInput(format!("database has no table for p = {p} and {n_t} target vertices")).into()),
        _ => Err(CliError::Usage(format!("several seed sizes have tables for p = {p}; pass --n-s"))),
    }
}

pub fn build_table(a: BuildTable) -> CliResult {
    let mut db = open_db(&a.db)?;
    let targets: Vec<(String, WeightedGraph)> = a
        .targets
        .iter()
        .map(|p| Ok((graph_ref(p), read_graph(p)?)))
        .collect::<CliResult<_>>()?;
    for (r, graph) in &targets {
        if let Some(existing) = db.graphs.get(r) {
            if existing != graph {
                return Err(Error::InvalidInput(format!("graph reference {r:?} already names a different graph")).into());
            }
        }
        db.graphs.insert(r.clone(), graph.clone());
    }
    let ts = timestamp();
    let mut built = Vec::new();
    for &p in &a.p {
        let n_s = infer_n_s(&db, p, a.n_s)?;
        let table = build_mapping_table(&db.records_for(n_s, p), &targets)?;
        built.push(json!({ "p": p, "n_s": n_s, "n_t": table.n_t, "rows": table.n_rows(), "columns": table.n_cols() }));
        let detail = format!("p={p} n_s={n_s} n_t={} columns={}", table.n_t, table.n_cols());
        match db.table_index(p, n_s, table.n_t) {
            Some(i) => db.tables[i] = table,
            None => db.tables.push(table),
        }
        db.log(ts, "build_table", detail);
    }
    write_database(&a.db, &db)?;
    print_json(&json!({ "tables": built }));
    Ok(())
}

pub fn transfer(g: &Global, a: Transfer) -> CliResult {
    let mut db = open_db(&a.db)?;
    let graph = read_graph(&a.graph)?;
    let target_ref = graph_ref(&a.graph);
    let n_s = table_n_s(&db, a.p, graph.n(), a.n_s)?;
    let table = db
        .table(a.p, n_s, graph.n())
        .ok_or_else(|| Error::InvalidInput(format!("database has no table for p = {}, n_s = {n_s}", a.p)))?;
    let density = graph.density()?;
    let sel = select_params(table, &db.records, density, &SelectionPolicy::default())?;
    let transferred = sel.records[0].params()?;

    let eval = QaoaEvaluator::new(&graph)?;
    let optimum = eval.optimum()?;
    let shots = g.shots();
    let state = eval.state(&transferred)?;
    let exact = eval.expectation_of_state(&state)? / optimum;
    let est = estimate_from_samples(&sample(&state, shots, sub_seed(g.seed, 0))?, &graph)?;
    let mut out = json!({
        "graph_ref": target_ref,
        "density": density,
        "p": a.p,
        "n_s": n_s,
        "interval": [sel.interval.0, sel.interval.1],
        "columns": sel.columns,
        "candidates": sel.records.iter().zip(&sel.scores).map(|(r, s)| json!({ "graph_ref": r.graph_ref, "score": s })).collect::<Vec<_>>(),
        "gamma": transferred.gamma(),
        "beta": transferred.beta(),
        "exact_ratio": exact,
        "mean_ratio": est.mean / optimum,
        "best_cut": best_cut_json(&est, optimum),
        "shots": shots,
        "seed": g.seed,
    });

    let mut final_params = transferred;
    let mut final_ratio = exact;
    if a.refine {
        let r = dqaoa::campaign::refine(&eval, &final_params, a.budget, shots, sub_seed(g.seed, 1))?;
        let state = eval.state(&r.params)?;
        let est = estimate_from_samples(&sample(&state, shots, sub_seed(g.seed, 2))?, &graph)?;
        out["refined"] = json!({
            "gamma": r.params.gamma(),
            "beta": r.params.beta(),
            "exact_ratio": r.final_ratio,
            "mean_ratio": est.mean / optimum,
            "best_cut": best_cut_json(&est, optimum),
            "evaluations": r.evaluations,
            "converged": r.converged,
        });
        final_ratio = r.final_ratio;
        final_params = r.params;
    }
    if a.add {
        let rec = ParamRecord {
            n: graph.n(),
            density,
            p: a.p,
            gamma: final_params.gamma().to_vec(),
            beta: final_params.beta().to_vec(),
            seed_ratio: final_ratio,
            graph_ref: target_ref,
        };
        let outcome = db.add_record(rec, &graph, timestamp())?;
        write_database(&a.db, &db)?;
        out["db"] = json!(outcome_name(outcome));
    }
    print_json(&out);
    Ok(())
}

pub fn run_qaoa(g: &Global, a: RunQaoa) -> CliResult {
    let graph = read_graph(&a.graph)?;
    let params = a.params.params()?;
    let eval = QaoaEvaluator::new(&graph)?;
    let optimum = eval.optimum()?;
    let state = eval.state(&params)?;
    let expectation = eval.expectation_of_state(&state)?;
    let shots = a.shots.unwrap_or_else(|| g.shots());
    let dist = sample(&state, shots, g.seed)?;
    let est = estimate_from_samples(&dist, &graph)?;
    if let Some(path) = &a.histogram {
        write_histogram_csv(path, &dist)?;
    }
    print_json(&json!({
        "p": params.p(),
        "expectation": expectation,
        "exact_ratio": expectation / optimum,
        "mean_ratio": est.mean / optimum,
        "best_cut": best_cut_json(&est, optimum),
        "shots": shots,
        "seed": g.seed,
    }));
    Ok(())
}

pub fn run_noisy(g: &Global, a: RunNoisy) -> CliResult {
    let graph = read_graph(&a.graph)?;
    let params = a.params.params()?;
    let model: NoiseModel = a.noise_model.parse()?;
    let optimum = brute_force_maxcut(&graph)?.value;
    let shots = a.shots.unwrap_or_else(|| g.shots());
    let method = a.method.unwrap_or(if graph.n() > DENSITY_QUBIT_CAP {
        NoisyMethod::Traj
    } else {
        NoisyMethod::Density
    });
    let (dist, summary) = if method == NoisyMethod::Traj {
        let n_traj = a.traj;
        let r = run_noisy_qaoa_trajectories(&graph, &params, model, n_traj, shots, g.seed)?;
        let summary = json!({
            "method": "trajectories",
            "trajectories": n_traj,
            "ratio": r.mean() / optimum,
            "ratio_std_err": r.standard_error() / optimum,
        });
        (r.distribution, summary)
    } else {
        let rho = run_noisy_qaoa_density(&graph, &params, model)?;
        let exact = noisy_expectation(&rho, &graph)?;
        let summary = json!({ "method": "density-matrix", "ratio": exact / optimum });
        (sample_density(&rho, shots, g.seed)?, summary)
    };
    let est = estimate_from_samples(&dist, &graph)?;
    if let Some(path) = &a.histogram {
        write_histogram_csv(path, &dist)?;
    }
    print_json(&json!({
        "model": { "p1": model.p1, "p2": model.p2 },
        "estimate": summary,
        "mean_ratio": est.mean / optimum,
        "best_cut": best_cut_json(&est, optimum),
        "shots": shots,
        "seed": g.seed,
    }));
    Ok(())
}

pub fn gw(g: &Global, a: Gw) -> CliResult {
    let graph = read_graph(&a.graph)?;
    let r = gw_baseline(&graph, a.cuts, g.seed)?;
    if let Some(path) = &a.histogram {
        write_ratio_histograms_csv(path, &[("gw", &r.distribution.histogram)])?;
    }
    print_json(&json!({
        "sdp_objective": r.sdp_objective,
        "optimum": r.optimum,
        "relaxation_converged": r.relaxation_converged,
        "mean_ratio": r.distribution.mean,
        "max_ratio": r.distribution.max,
        "std_err": r.distribution.std_err,
        "cuts": a.cuts,
        "seed": g.seed,
    }));
    Ok(())
}

pub fn compare(g: &Global, a: Compare) -> CliResult {
    let db = open_db(&a.db)?;
    let graph = read_graph(&a.graph)?;
    let gref = graph_ref(&a.graph);
    let density = graph.density()?;
    let eval = QaoaEvaluator::new(&graph)?;
    let optimum = eval.optimum()?;
    let shots = g.shots();
    let mut rows = Vec::new();
    let row = |method, p, mean_ratio, best_ratio, shots, seed| ResultRow {
        graph_ref: gref.clone(),
        density,
        p,
        method,
        mean_ratio,
        best_ratio,
        shots,
        seed,
        wall_time: 0.0,
    };
    for (i, &p) in a.p.iter().enumerate() {
        let n_s = table_n_s(&db, p, graph.n(), a.n_s)?;
        let table = db
            .table(p, n_s, graph.n())
            .ok_or_else(|| Error::InvalidInput(format!("database has no table for p = {p}, n_s = {n_s}")))?;
        let sel = select_params(table, &db.records, density, &SelectionPolicy::default())?;
        let seed = sub_seed(g.seed, i as u64);
        let state = eval.state(&sel.records[0].params()?)?;
        let est = estimate_from_samples(&sample(&state, shots, seed)?, &graph)?;
        rows.push(row(
            Method::Transfer,
            p,
            eval.expectation_of_state(&state)? / optimum,
            est.best_value / optimum,
            shots,
            seed,
        ));

        let draws = draw_starts(p, a.random_draws.max(1), sub_seed(seed, 1));
        let (mut mean, mut best) = (0.0, 0.0f64);
        for (k, x) in draws.iter().enumerate() {
            let state = eval.state(&QaoaParams::from_flat(x)?)?;
            mean += eval.expectation_of_state(&state)? / optimum;
            let est = estimate_from_samples(&sample(&state, shots, sub_seed(seed, 2 + k as u64))?, &graph)?;
            best = best.max(est.best_value / optimum);
        }
        rows.push(row(Method::Random, p, mean / draws.len() as f64, best, shots, sub_seed(seed, 1)));
    }
    let gw_seed = sub_seed(g.seed, a.p.len() as u64);
    let r = gw_baseline(&graph, a.cuts, gw_seed)?;
    rows.push(row(Method::Gw, 0, r.distribution.mean, r.distribution.max, a.cuts as u64, gw_seed));
    let csv = results_csv_string(&rows)?;
    match &a.out {
        Some(path) => write_text(path, &csv)?,
        None => print_text(&csv),
    }
    Ok(())
}

pub fn pf_weights(a: PfWeights) -> CliResult {
    let mut case = match &a.case {
        Some(path) => read_case(path)?,
        None => PowerFlowCase::sample(),
    };
    if let Some(s) = &a.scenario {
        case = if Path::new(s).is_file() {
            let scenario: Scenario = read_json(s)?;
            case.with_scenario(&scenario)?
        } else {
            case.scenario(s)?
        };
    }
    let sol = solve_power_flow(&case, &PfOptions::default())?;
    let graph = line_weights(&case, &sol)?;
    write_graph(&a.out, &graph)?;
    print_json(&json!({
        "iterations": sol.iterations,
        "max_mismatch": sol.max_mismatch(),
        "balance_residual": power_balance_residual(&case, &sol)?,
        "vertices": graph.n(),
        "edges": graph.m(),
        "density": graph.density()?,
    }));
    Ok(())
}

pub fn db(c: DbCommand) -> CliResult {
    match c {
        DbCommand::Add(a) => db_add(a),
        DbCommand::List(a) => {
            let db = read_database(&a.db)?;
            print_json(&json!({
                "records": db.records.iter().map(|r| json!({
                    "graph_ref": r.graph_ref, "n": r.n, "p": r.p, "density": r.density, "ratio": r.seed_ratio,
                })).collect::<Vec<_>>(),
                "tables": db.tables.iter().map(|t| json!({
                    "p": t.p, "n_s": t.n_s, "n_t": t.n_t, "rows": t.n_rows(), "columns": t.n_cols(),
                })).collect::<Vec<_>>(),
                "graphs": db.graphs.len(),
                "journal": db.journal.len(),
            }));
            Ok(())
        }
        DbCommand::Validate(a) => {
            let db = read_database(&a.db)?;
            let issues = db.validate();
            print_json(&json!({ "records": db.records.len(), "tables": db.tables.len(), "issues": issues }));
            if issues.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{} validation issue(s); first: {}", issues.len(), issues[0])).into())
            }
        }
    }
}

fn db_add(a: DbAdd) -> CliResult {
    let mut db = open_db(&a.db)?;
    let graph = read_graph(&a.graph)?;
    let rec = match (&a.record, &a.gamma, &a.beta) {
        (Some(path), _, _) => read_json::<ParamRecord>(path)?,
        (None, Some(gamma), Some(beta)) => {
            let params = QaoaParams::new(gamma.clone(), beta.clone())?;
            let eval = QaoaEvaluator::new(&graph)?;
            ParamRecord {
                n: graph.n(),
                density: graph.density()?,
                p: params.p(),
                gamma: gamma.clone(),
                beta: beta.clone(),
                seed_ratio: eval.expectation(&params)? / eval.optimum()?,
                graph_ref: graph_ref(&a.graph),
            }
        }
        _ => return Err(CliError::Usage("pass --record or both --gamma and --beta".into())),
    };
    let summary = json!({ "graph_ref": rec.graph_ref, "p": rec.p, "ratio": rec.seed_ratio });
    let outcome = db.add_record(rec, &graph, timestamp())?;
    write_database(&a.db, &db)?;
    print_json(&json!({ "record": summary, "outcome": outcome_name(outcome) }));
    Ok(())
}
