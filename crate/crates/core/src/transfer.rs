//! Seed-parameter database, mapping tables and density-based selection.
//!
//! A [`MappingTable`] holds, for one depth `p` and one pair of graph sizes, the
//! approximation ratio of every seed's optimized parameters applied to every
//! target graph. Rows (seeds) and columns (targets) are kept sorted by
//! density, then by reference.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::optimize::{fourier_with_evaluator, multistart_with_evaluator, MultistartOptions};
use crate::simulator::{QaoaEvaluator, QaoaParams};
use crate::sub_seed;

/// Records whose claimed ratio differs from a re-evaluation by more than this
/// are rejected.
pub const VALIDATION_TOL: f64 = 1e-6;

/// Consecutive seed densities further apart than this trigger a warning.
pub const MAX_DENSITY_GAP: f64 = 0.25;

/// Depths up to this use multistart; deeper ones use the FOURIER ladder.
pub const MULTISTART_MAX_P: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub n: usize,
    pub density: f64,
    pub p: usize,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub seed_ratio: f64,
    pub graph_ref: String,
}

impl ParamRecord {
    pub fn params(&self) -> Result<QaoaParams> {
        if self.gamma.len() != self.p {
            return Err(Error::InvalidInput(format!(
                "record {} declares p = {} but has {} angles",
                self.graph_ref,
                self.p,
                self.gamma.len()
            )));
        }
        QaoaParams::new(self.gamma.clone(), self.beta.clone())
    }

    fn key(&self) -> (&str, usize) {
        (&self.graph_ref, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingTable {
    pub p: usize,
    pub n_s: usize,
    pub n_t: usize,
    pub row_refs: Vec<String>,
    pub row_densities: Vec<f64>,
    pub col_refs: Vec<String>,
    pub col_densities: Vec<f64>,
    /// Exact Max-Cut of each column graph.
    pub col_optima: Vec<f64>,
    /// `entries[i][j]`: ratio of row `i`'s parameters on column `j`.
    pub entries: Vec<Vec<f64>>,
    /// Raw expectations behind `entries`.
    pub expectations: Vec<Vec<f64>>,
}

impl MappingTable {
    pub fn n_rows(&self) -> usize {
        self.row_refs.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_refs.len()
    }

    pub fn row_index(&self, graph_ref: &str) -> Option<usize> {
        self.row_refs.iter().position(|r| r == graph_ref)
    }

    pub fn col_index(&self, graph_ref: &str) -> Option<usize> {
        self.col_refs.iter().position(|r| r == graph_ref)
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.entries.iter().map(|r| r[col]).collect()
    }

    /// Row with the largest entry in `col`; earliest row wins ties.
    pub fn best_row(&self, col: usize) -> Option<usize> {
        argmax(&self.column(col))
    }

    /// Row with the smallest entry in `col`; earliest row wins ties.
    pub fn worst_row(&self, col: usize) -> Option<usize> {
        let column = self.column(col);
        (0..column.len()).reduce(|a, b| if column[b] < column[a] { b } else { a })
    }

    fn insert_row(&mut self, graph_ref: String, density: f64, ratios: Vec<f64>, expectations: Vec<f64>) {
        let at = self
            .row_refs
            .iter()
            .zip(&self.row_densities)
            .position(|(r, &d)| axis_order((d, r), (density, &graph_ref)) == Ordering::Greater)
            .unwrap_or(self.n_rows());
        self.row_refs.insert(at, graph_ref);
        self.row_densities.insert(at, density);
        self.entries.insert(at, ratios);
        self.expectations.insert(at, expectations);
    }

    fn insert_col(&mut self, graph_ref: String, density: f64, optimum: f64, ratios: Vec<f64>, expectations: Vec<f64>) {
        let at = self
            .col_refs
            .iter()
            .zip(&self.col_densities)
            .position(|(r, &d)| axis_order((d, r), (density, &graph_ref)) == Ordering::Greater)
            .unwrap_or(self.n_cols());
        self.col_refs.insert(at, graph_ref);
        self.col_densities.insert(at, density);
        self.col_optima.insert(at, optimum);
        for (row, (r, e)) in self.entries.iter_mut().zip(&mut self.expectations).enumerate() {
            r.insert(at, ratios[row]);
            e.insert(at, expectations[row]);
        }
    }

    /// Checks shape, sort order and entry bounds.
    pub fn check_invariants(&self) -> Result<()> {
        let (r, c) = (self.n_rows(), self.n_cols());
        let shape_ok = self.row_densities.len() == r
            && self.col_densities.len() == c
            && self.col_optima.len() == c
            && self.entries.len() == r
            && self.expectations.len() == r
            && self.entries.iter().chain(&self.expectations).all(|row| row.len() == c);
        if !shape_ok {
            return Err(Error::InvalidInput("mapping table has inconsistent dimensions".into()));
        }
        let sorted = |refs: &[String], dens: &[f64]| {
            (1..refs.len()).all(|k| axis_order((dens[k - 1], &refs[k - 1]), (dens[k], &refs[k])) == Ordering::Less)
        };
        if !sorted(&self.row_refs, &self.row_densities) || !sorted(&self.col_refs, &self.col_densities) {
            return Err(Error::InvalidInput("mapping table axes are not strictly sorted".into()));
        }
        if let Some(v) = self.entries.iter().flatten().find(|v| !(0.0..=1.0 + 1e-12).contains(*v)) {
            return Err(Error::InvalidInput(format!("mapping table entry {v} outside [0, 1]")));
        }
        Ok(())
    }
}

fn axis_order(a: (f64, &String), b: (f64, &String)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1))
}

fn argmax(v: &[f64]) -> Option<usize> {
    (0..v.len()).reduce(|a, b| if v[b] > v[a] { b } else { a })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalEntry {
    pub seq: u64,
    /// Seconds since the Unix epoch, as supplied by the caller.
    pub timestamp: u64,
    pub action: String,
    pub detail: String,
}

/// Seed records, mapping tables, the graphs they reference and an
/// append-only journal of every mutation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Database {
    pub records: Vec<ParamRecord>,
    pub tables: Vec<MappingTable>,
    pub graphs: BTreeMap<String, WeightedGraph>,
    pub journal: Vec<JournalEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpandOutcome {
    Added,
    Replaced,
    Unchanged,
}

impl Database {
    pub fn record(&self, graph_ref: &str, p: usize) -> Option<&ParamRecord> {
        self.records.iter().find(|r| r.key() == (graph_ref, p))
    }

    pub fn records_for(&self, n: usize, p: usize) -> Vec<ParamRecord> {
        self.records.iter().filter(|r| r.n == n && r.p == p).cloned().collect()
    }

    pub fn table_index(&self, p: usize, n_s: usize, n_t: usize) -> Option<usize> {
        self.tables.iter().position(|t| (t.p, t.n_s, t.n_t) == (p, n_s, n_t))
    }

    pub fn table(&self, p: usize, n_s: usize, n_t: usize) -> Option<&MappingTable> {
        self.table_index(p, n_s, n_t).map(|i| &self.tables[i])
    }

    /// Tables at depth `p` whose target size is `n_t`.
    pub fn tables_for_target(&self, p: usize, n_t: usize) -> Vec<&MappingTable> {
        self.tables.iter().filter(|t| t.p == p && t.n_t == n_t).collect()
    }

    pub fn graph(&self, graph_ref: &str) -> Result<&WeightedGraph> {
        self.graphs
            .get(graph_ref)
            .ok_or_else(|| Error::InvalidInput(format!("unknown graph reference {graph_ref:?}")))
    }

    /// Appends a journal entry.
    pub fn log(&mut self, timestamp: u64, action: &str, detail: String) {
        let seq = self.journal.last().map_or(0, |e| e.seq + 1);
        self.journal.push(JournalEntry {
            seq,
            timestamp,
            action: action.to_string(),
            detail,
        });
    }

    fn register_graph(&mut self, graph_ref: &str, g: &WeightedGraph) -> Result<()> {
        match self.graphs.get(graph_ref) {
            Some(existing) if existing != g => Err(Error::InvalidInput(format!(
                "graph reference {graph_ref:?} already names a different graph"
            ))),
            Some(_) => Ok(()),
            None => {
                self.graphs.insert(graph_ref.to_string(), g.clone());
                Ok(())
            }
        }
    }

    /// Adds a seed record after re-deriving its ratio on `g`.
    ///
    /// A record for an existing `(graph_ref, p)` replaces the stored one only
    /// when its ratio is strictly higher. Every table at the record's depth
    /// whose seed size matches gains (or refreshes) the corresponding row.
    pub fn add_record(&mut self, rec: ParamRecord, g: &WeightedGraph, timestamp: u64) -> Result<ExpandOutcome> {
        validate_record(&rec, g)?;
        if let Some(existing) = self.graphs.get(&rec.graph_ref) {
            if existing != g {
                return Err(Error::InvalidInput(format!(
                    "graph reference {:?} already names a different graph",
                    rec.graph_ref
                )));
            }
        }
        let outcome = match self.records.iter().position(|r| r.key() == rec.key()) {
            Some(i) if rec.seed_ratio > self.records[i].seed_ratio => {
                self.records[i] = rec.clone();
                ExpandOutcome::Replaced
            }
            Some(_) => return Ok(ExpandOutcome::Unchanged),
            None => {
                self.records.push(rec.clone());
                ExpandOutcome::Added
            }
        };
        self.register_graph(&rec.graph_ref, g)?;

        for t in 0..self.tables.len() {
            let table = &self.tables[t];
            if table.p != rec.p || table.n_s != rec.n {
                continue;
            }
            let (ratios, expectations) = self.evaluate_row(table, &rec)?;
            let table = &mut self.tables[t];
            if let Some(row) = table.row_index(&rec.graph_ref) {
                table.row_refs.remove(row);
                table.row_densities.remove(row);
                table.entries.remove(row);
                table.expectations.remove(row);
            }
            table.insert_row(rec.graph_ref.clone(), rec.density, ratios, expectations);
        }
        let action = match outcome {
            ExpandOutcome::Added => "add_record",
            _ => "replace_record",
        };
        self.log(
            timestamp,
            action,
            format!("graph_ref={} p={} ratio={}", rec.graph_ref, rec.p, rec.seed_ratio),
        );
        Ok(outcome)
    }

    fn evaluate_row(&self, table: &MappingTable, rec: &ParamRecord) -> Result<(Vec<f64>, Vec<f64>)> {
        let params = rec.params()?;
        let mut ratios = Vec::with_capacity(table.n_cols());
        let mut expectations = Vec::with_capacity(table.n_cols());
        for (c, col_ref) in table.col_refs.iter().enumerate() {
            let eval = QaoaEvaluator::new(self.graph(col_ref)?)?;
            let e = eval.expectation(&params)?;
            expectations.push(e);
            ratios.push(e / table.col_optima[c]);
        }
        Ok((ratios, expectations))
    }

    /// Adds a target graph as a new column of table `t`, evaluating every row.
    pub fn add_column(&mut self, t: usize, col_ref: &str, g: &WeightedGraph, timestamp: u64) -> Result<()> {
        let table = self
            .tables
            .get(t)
            .ok_or_else(|| Error::InvalidInput(format!("no table with index {t}")))?;
        if table.col_index(col_ref).is_some() {
            return Ok(());
        }
        if g.n() != table.n_t {
            return Err(Error::InvalidInput(format!(
                "column graph has {} vertices, table targets have {}",
                g.n(),
                table.n_t
            )));
        }
        let rows: Vec<QaoaParams> = table
            .row_refs
            .iter()
            .map(|r| {
                self.record(r, table.p)
                    .ok_or_else(|| Error::InvalidInput(format!("table row {r:?} has no record")))?
                    .params()
            })
            .collect::<Result<_>>()?;
        let (optimum, ratios, expectations) = evaluate_column(g, &rows)?;
        let density = g.density()?;
        self.register_graph(col_ref, g)?;
        self.tables[t].insert_col(col_ref.to_string(), density, optimum, ratios, expectations);
        self.log(timestamp, "add_column", format!("table={t} col_ref={col_ref}"));
        Ok(())
    }

    /// Inserts the `(row_ref, col_ref)` pair into table `t`, adding the row or
    /// column when missing, after checking `score` against a re-evaluation.
    /// Nothing is modified when the check fails.
    pub fn add_entry(&mut self, t: usize, row_ref: &str, col_ref: &str, score: f64, timestamp: u64) -> Result<()> {
        let table = self
            .tables
            .get(t)
            .ok_or_else(|| Error::InvalidInput(format!("no table with index {t}")))?;
        let rec = self
            .record(row_ref, table.p)
            .ok_or_else(|| Error::InvalidInput(format!("no record for {row_ref:?} at p = {}", table.p)))?
            .clone();
        if rec.n != table.n_s {
            return Err(Error::InvalidInput(format!(
                "record {row_ref:?} has n = {}, table seeds have n = {}",
                rec.n, table.n_s
            )));
        }
        let target = self.graph(col_ref)?.clone();
        let eval = QaoaEvaluator::new(&target)?;
        let actual = eval.expectation(&rec.params()?)? / eval.optimum()?;
        if (actual - score).abs() > VALIDATION_TOL {
            return Err(Error::ValidationMismatch {
                what: format!("entry ({row_ref}, {col_ref})"),
                claimed: score,
                actual,
            });
        }
        if self.tables[t].row_index(row_ref).is_none() {
            let (ratios, expectations) = self.evaluate_row(&self.tables[t], &rec)?;
            self.tables[t].insert_row(rec.graph_ref.clone(), rec.density, ratios, expectations);
        }
        self.add_column(t, col_ref, &target, timestamp)?;
        self.log(timestamp, "add_entry", format!("table={t} row_ref={row_ref} col_ref={col_ref} score={score}"));
        Ok(())
    }

    /// Re-derives every record ratio and table entry; returns one message per
    /// discrepancy larger than [`VALIDATION_TOL`].
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for rec in &self.records {
            match self.graph(&rec.graph_ref).and_then(|g| validate_record(rec, g)) {
                Ok(()) => {}
                Err(e) => issues.push(format!("record ({}, p={}): {e}", rec.graph_ref, rec.p)),
            }
        }
        for (t, table) in self.tables.iter().enumerate() {
            if let Err(e) = table.check_invariants() {
                issues.push(format!("table {t}: {e}"));
                continue;
            }
            for (r, row_ref) in table.row_refs.iter().enumerate() {
                let Some(rec) = self.record(row_ref, table.p) else {
                    issues.push(format!("table {t}: row {row_ref:?} has no record"));
                    continue;
                };
                let Ok((ratios, _)) = self.evaluate_row(table, rec) else {
                    issues.push(format!("table {t}: row {row_ref:?} could not be evaluated"));
                    continue;
                };
                for (c, (&stored, actual)) in table.entries[r].iter().zip(ratios).enumerate() {
                    if (stored - actual).abs() > VALIDATION_TOL {
                        issues.push(format!(
                            "table {t}: entry ({row_ref}, {}) stored {stored}, re-derived {actual}",
                            table.col_refs[c]
                        ));
                    }
                }
            }
        }
        issues
    }
}

/// Re-evaluates a record on its graph.
pub fn validate_record(rec: &ParamRecord, g: &WeightedGraph) -> Result<()> {
    if rec.n != g.n() {
        return Err(Error::InvalidInput(format!(
            "record declares n = {}, graph has {} vertices",
            rec.n,
            g.n()
        )));
    }
    let density = g.density()?;
    if (density - rec.density).abs() > VALIDATION_TOL {
        return Err(Error::ValidationMismatch {
            what: format!("density of {}", rec.graph_ref),
            claimed: rec.density,
            actual: density,
        });
    }
    let eval = QaoaEvaluator::new(g)?;
    let actual = eval.expectation(&rec.params()?)? / eval.optimum()?;
    if (actual - rec.seed_ratio).abs() > VALIDATION_TOL {
        return Err(Error::ValidationMismatch {
            what: format!("ratio of {} at p = {}", rec.graph_ref, rec.p),
            claimed: rec.seed_ratio,
            actual,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BuildOptions {
    pub multistart: MultistartOptions,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BuildReport {
    pub records: Vec<ParamRecord>,
    /// `(graph_ref, p, message)` for every omitted record.
    pub failures: Vec<(String, usize, String)>,
    pub warnings: Vec<String>,
}

/// Optimizes every seed at every requested depth.
///
/// Depths up to [`MULTISTART_MAX_P`] use multistart; deeper ones share one
/// FOURIER ladder per graph. Each graph draws from its own RNG stream, derived
/// from `opts.rng_seed` and its position in `seeds`.
pub fn build_database(seeds: &[(String, WeightedGraph)], p_list: &[usize], opts: &BuildOptions) -> BuildReport {
    let mut report = BuildReport::default();
    if p_list.contains(&0) {
        report
            .failures
            .extend(seeds.iter().map(|(r, _)| (r.clone(), 0, "layer count p must be at least 1".to_string())));
    }
    let mut densities: Vec<f64> = seeds.iter().filter_map(|(_, g)| g.density().ok()).collect();
    densities.sort_by(f64::total_cmp);
    if let Some(gap) = densities.windows(2).map(|w| w[1] - w[0]).reduce(f64::max) {
        if gap > MAX_DENSITY_GAP {
            report.warnings.push(format!(
                "seed densities leave a gap of {gap:.4} (more than {MAX_DENSITY_GAP})"
            ));
        }
    }

    let per_graph: Vec<Vec<std::result::Result<ParamRecord, (String, usize, String)>>> = seeds
        .par_iter()
        .enumerate()
        .map(|(idx, (graph_ref, g))| seed_records(idx, graph_ref, g, p_list, opts))
        .collect();
    for out in per_graph.into_iter().flatten() {
        match out {
            Ok(rec) => report.records.push(rec),
            Err(f) => report.failures.push(f),
        }
    }
    report
}

fn seed_records(
    idx: usize,
    graph_ref: &str,
    g: &WeightedGraph,
    p_list: &[usize],
    opts: &BuildOptions,
) -> Vec<std::result::Result<ParamRecord, (String, usize, String)>> {
    let fail = |p: usize, e: String| Err((graph_ref.to_string(), p, e));
    let setup = QaoaEvaluator::new(g).and_then(|eval| Ok((g.density()?, eval)));
    let (density, eval) = match setup {
        Ok(v) => v,
        Err(e) => {
            return p_list.iter().filter(|&&p| p > 0).map(|&p| fail(p, e.to_string())).collect();
        }
    };
    let graph_seed = sub_seed(opts.rng_seed, idx as u64);
    let deep_max = p_list.iter().copied().filter(|&p| p > MULTISTART_MAX_P).max();
    let ladder = deep_max.map(|pm| {
        fourier_with_evaluator(&eval, pm, &opts.multistart, sub_seed(graph_seed, 0)).map_err(|e| e.to_string())
    });

    p_list
        .iter()
        .filter(|&&p| p > 0)
        .map(|&p| {
            let result = if p <= MULTISTART_MAX_P {
                multistart_with_evaluator(&eval, p, &opts.multistart, sub_seed(graph_seed, p as u64))
                    .map_err(|e| e.to_string())
            } else {
                match ladder.as_ref().expect("ladder built for deep p") {
                    Ok(l) => Ok(l[p - 1].clone()),
                    Err(e) => Err(e.clone()),
                }
            };
            match result {
                Ok(r) => Ok(ParamRecord {
                    n: g.n(),
                    density,
                    p,
                    gamma: r.params.gamma().to_vec(),
                    beta: r.params.beta().to_vec(),
                    seed_ratio: r.ratio,
                    graph_ref: graph_ref.to_string(),
                }),
                Err(e) => fail(p, e),
            }
        })
        .collect()
}

fn evaluate_column(g: &WeightedGraph, rows: &[QaoaParams]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let eval = QaoaEvaluator::new(g)?;
    let optimum = eval.optimum()?;
    let expectations: Vec<f64> = rows.iter().map(|p| eval.expectation(p)).collect::<Result<_>>()?;
    let ratios = expectations.iter().map(|e| e / optimum).collect();
    Ok((optimum, ratios, expectations))
}

/// Evaluates every record on every target.
///
/// All records must share `p` and `n`; all targets must share `n`. Columns
/// are evaluated in parallel and placed by sorted position, so the result
/// does not depend on scheduling.
pub fn build_mapping_table(records: &[ParamRecord], targets: &[(String, WeightedGraph)]) -> Result<MappingTable> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidInput("mapping table needs at least one seed record".into()))?;
    let (p, n_s) = (first.p, first.n);
    if let Some(r) = records.iter().find(|r| (r.p, r.n) != (p, n_s)) {
        return Err(Error::InvalidInput(format!(
            "record {} has (p, n) = ({}, {}), expected ({p}, {n_s})",
            r.graph_ref, r.p, r.n
        )));
    }
    let n_t = targets
        .first()
        .ok_or_else(|| Error::InvalidInput("mapping table needs at least one target".into()))?
        .1
        .n();
    if let Some((r, g)) = targets.iter().find(|(_, g)| g.n() != n_t) {
        return Err(Error::InvalidInput(format!(
            "target {r} has {} vertices, expected {n_t}",
            g.n()
        )));
    }

    let mut rows: Vec<&ParamRecord> = records.iter().collect();
    rows.sort_by(|a, b| axis_order((a.density, &a.graph_ref), (b.density, &b.graph_ref)));
    if let Some(w) = rows.windows(2).find(|w| w[0].graph_ref == w[1].graph_ref) {
        return Err(Error::InvalidInput(format!("duplicate seed record {}", w[0].graph_ref)));
    }
    let row_params: Vec<QaoaParams> = rows.iter().map(|r| r.params()).collect::<Result<_>>()?;

    let mut cols: Vec<(&String, &WeightedGraph, f64)> = targets
        .iter()
        .map(|(r, g)| Ok((r, g, g.density()?)))
        .collect::<Result<_>>()?;
    cols.sort_by(|a, b| axis_order((a.2, a.0), (b.2, b.0)));
    if let Some(w) = cols.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidInput(format!("duplicate target {}", w[0].0)));
    }

    let columns: Vec<(f64, Vec<f64>, Vec<f64>)> = cols
        .par_iter()
        .map(|(_, g, _)| evaluate_column(g, &row_params))
        .collect::<Result<_>>()?;

    let entries = (0..rows.len()).map(|i| columns.iter().map(|c| c.1[i]).collect()).collect();
    let expectations = (0..rows.len()).map(|i| columns.iter().map(|c| c.2[i]).collect()).collect();
    Ok(MappingTable {
        p,
        n_s,
        n_t,
        row_refs: rows.iter().map(|r| r.graph_ref.clone()).collect(),
        row_densities: rows.iter().map(|r| r.density).collect(),
        col_refs: cols.iter().map(|c| c.0.clone()).collect(),
        col_densities: cols.iter().map(|c| c.2).collect(),
        col_optima: columns.iter().map(|c| c.0).collect(),
        entries,
        expectations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    /// Rows scoring within this of the best row are candidates.
    pub slack: f64,
    /// Maximum number of rows returned.
    pub top_k: usize,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self { slack: 0.01, top_k: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSelection {
    /// `[D̃_l, D̃_r]` spanned by the chosen seeds.
    pub interval: (f64, f64),
    /// Chosen records, best score first.
    pub records: Vec<ParamRecord>,
    pub scores: Vec<f64>,
    /// Columns whose density was nearest the target.
    pub columns: Vec<String>,
}

/// Chooses seed parameters for a target of density `target_density`.
///
/// The column(s) nearest in density are selected (all of them on an exact
/// tie). Each row is scored by its mean entry over those columns; rows within
/// `policy.slack` of the best score are kept, up to `policy.top_k`, best
/// first with earlier (lower-density) rows winning ties.
pub fn select_params(
    table: &MappingTable,
    records: &[ParamRecord],
    target_density: f64,
    policy: &SelectionPolicy,
) -> Result<TransferSelection> {
    if table.n_rows() == 0 || table.n_cols() == 0 {
        return Err(Error::InvalidInput("cannot select from an empty mapping table".into()));
    }
    if policy.top_k == 0 || policy.slack.is_nan() || policy.slack < 0.0 {
        return Err(Error::InvalidInput("selection needs top_k >= 1 and slack >= 0".into()));
    }
    let gaps: Vec<f64> = table.col_densities.iter().map(|d| (d - target_density).abs()).collect();
    let nearest = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let cols: Vec<usize> = (0..table.n_cols()).filter(|&c| gaps[c] <= nearest + 1e-12).collect();
    let scores: Vec<f64> = table
        .entries
        .iter()
        .map(|row| cols.iter().map(|&c| row[c]).sum::<f64>() / cols.len() as f64)
        .collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut chosen: Vec<usize> = (0..scores.len()).filter(|&r| scores[r] >= best - policy.slack).collect();
    chosen.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    chosen.truncate(policy.top_k);

    let picked: Vec<ParamRecord> = chosen
        .iter()
        .map(|&r| {
            records
                .iter()
                .find(|rec| rec.key() == (table.row_refs[r].as_str(), table.p))
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidInput(format!("table row {:?} has no record at p = {}", table.row_refs[r], table.p))
                })
        })
        .collect::<Result<_>>()?;
    let lo = picked.iter().map(|r| r.density).fold(f64::INFINITY, f64::min);
    let hi = picked.iter().map(|r| r.density).fold(f64::NEG_INFINITY, f64::max);
    Ok(TransferSelection {
        interval: (lo, hi),
        scores: chosen.iter().map(|&r| scores[r]).collect(),
        records: picked,
        columns: cols.iter().map(|&c| table.col_refs[c].clone()).collect(),
    })
}
