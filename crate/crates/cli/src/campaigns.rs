use std::path::PathBuf;

use clap::{Args, Subcommand};
use dqaoa::campaign::{
    gw_compare, noise_campaign, random_vs_transfer, DeskConfig, GwCompareConfig, NoiseConfig, RandomVsTransferConfig,
};
use dqaoa::io::{write_database, write_ratio_histograms_csv, write_results_csv};
use dqaoa::noise::NoiseModel;
use serde_json::json;

use crate::{print_json, timestamp, CliResult, Global};

#[derive(Debug, Subcommand)]
pub enum CampaignCommand {
    /// Transferred versus random parameters on density-spanning targets.
    RandomVsTransfer(RandomVsTransfer),
    /// Transferred QAOA versus Goemans-Williamson.
    GwCompare(GwCompare),
    /// Noiseless versus depolarizing-noise ratios of optimized circuits.
    Noise(Noise),
}

#[derive(Debug, Args)]
pub struct DeskArgs {
    /// Target vertex count.
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Seed vertex count.
    #[arg(long, default_value_t = 8)]
    n_s: usize,
    /// Seed graphs spanning the density range.
    #[arg(long, default_value_t = 7)]
    seeds: usize,
    /// Column graphs of each mapping table.
    #[arg(long, default_value_t = 20)]
    table_targets: usize,
    /// Evaluation targets.
    #[arg(long)]
    targets: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    /// Unit weights instead of random weights.
    #[arg(long)]
    unweighted: bool,
    /// Also write the desk's parameter database.
    #[arg(long)]
    db_out: Option<PathBuf>,
}

impl DeskArgs {
    fn config(&self, g: &Global, default: DeskConfig) -> DeskConfig {
        DeskConfig {
            n_s: self.n_s,
            n_seeds: self.seeds,
            n_t: self.n,
            n_table_targets: self.table_targets,
            n_targets: self.targets.unwrap_or(default.n_targets),
            weighted: !self.unweighted,
            p_list: self.p.clone().unwrap_or(default.p_list.clone()),
            seed: g.seed,
            timestamp: timestamp(),
            ..default
        }
    }
}

#[derive(Debug, Args)]
pub struct RandomVsTransfer {
    #[command(flatten)]
    desk: DeskArgs,
    /// Random parameter draws per target and depth.
    #[arg(long, default_value_t = 10)]
    random_draws: usize,
    /// COBYLA budget for the refinement study (0 skips it).
    #[arg(long, default_value_t = 100)]
    refine_budget: usize,
    /// Result CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GwCompare {
    #[command(flatten)]
    desk: DeskArgs,
    #[arg(long, default_value_t = dqaoa::gw::DEFAULT_CUTS)]
    cuts: usize,
    /// Result CSV.
    #[arg(long)]
    out: PathBuf,
    /// Pooled ratio histograms per method.
    #[arg(long)]
    histograms: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Noise {
    /// Noise models, comma separated (`I`, `II`, `custom:<p1>;<p2>`).
    #[arg(long, value_delimiter = ',', default_value = "I,II")]
    models: Vec<String>,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    graphs: usize,
    /// Result CSV.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(g: &Global, c: CampaignCommand) -> CliResult {
    match c {
        CampaignCommand::RandomVsTransfer(a) => {
            let base = RandomVsTransferConfig::default();
            let cfg = RandomVsTransferConfig {
                desk: a.desk.config(g, base.desk.clone()),
                random_draws: a.random_draws,
                shots: g.shots(),
                refine_budget: (a.refine_budget > 0).then_some(a.refine_budget),
                record_timing: !g.no_timing,
                ..base
            };
            let report = random_vs_transfer(&cfg)?;
            write_results_csv(&a.out, &report.rows)?;
            if let Some(path) = &a.desk.db_out {
                write_database(path, &report.desk.db)?;
            }
            print_json(&json!({
                "seed": g.seed,
                "rows": report.rows.len(),
                "warnings": report.desk.warnings,
                "summaries": report.summaries.iter().map(|s| json!({
                    "p": s.p,
                    "targets": s.targets,
                    "transfer_mean": s.transfer_mean,
                    "random_mean": s.random_mean,
                    "low_density_targets": s.low_targets,
                    "low_density_transfer_mean": s.low_transfer_mean,
                    "low_density_random_mean": s.low_random_mean,
                    "refine_gain_best_row": s.refine_gain_best,
                    "refine_gain_worst_row": s.refine_gain_worst,
                })).collect::<Vec<_>>(),
            }));
            Ok(())
        }
        CampaignCommand::GwCompare(a) => {
            let base = GwCompareConfig::default();
            let cfg = GwCompareConfig {
                desk: a.desk.config(g, base.desk.clone()),
                n_cuts: a.cuts,
                shots: g.shots(),
                record_timing: !g.no_timing,
                ..base
            };
            let report = gw_compare(&cfg)?;
            write_results_csv(&a.out, &report.rows)?;
            if let Some(path) = &a.histograms {
                let names: Vec<String> = report.qaoa_histograms.iter().map(|(p, _)| format!("qaoa_p{p}")).collect();
                let mut series: Vec<(&str, &[u64])> = vec![("gw", &report.gw_histogram)];
                series.extend(names.iter().zip(&report.qaoa_histograms).map(|(n, (_, h))| (n.as_str(), h.as_slice())));
                write_ratio_histograms_csv(path, &series)?;
            }
            if let Some(path) = &a.desk.db_out {
                write_database(path, &report.desk.db)?;
            }
            print_json(&json!({
                "seed": g.seed,
                "targets": report.targets.len(),
                "beats_gw": report.beats.iter().map(|(p, b)| json!({ "p": p, "targets": b })).collect::<Vec<_>>(),
                "tables": report.structure.iter().map(|s| json!({
                    "p": s.p,
                    "rows": s.rows,
                    "lowest_column_best_row": s.lowest_column_best_row,
                    "densest_column_best_row": s.densest_column_best_row,
                })).collect::<Vec<_>>(),
                "warnings": report.desk.warnings,
            }));
            Ok(())
        }
        CampaignCommand::Noise(a) => {
            let models = a
                .models
                .iter()
                .map(|m| Ok((m.clone(), m.replace(';', ",").parse::<NoiseModel>()?)))
                .collect::<CliResult<Vec<_>>>()?;
            let cfg = NoiseConfig {
                n: a.n,
                p: a.p,
                n_graphs: a.graphs,
                models,
                shots: g.shots(),
                seed: g.seed,
                record_timing: !g.no_timing,
                ..NoiseConfig::default()
            };
            let report = noise_campaign(&cfg)?;
            write_results_csv(&a.out, &report.rows)?;
            print_json(&json!({
                "seed": g.seed,
                "noiseless_mean": report.noiseless_mean,
                "models": report.model_names.iter().enumerate().map(|(i, name)| json!({
                    "model": name,
                    "mean_ratio": report.model_means[i],
                    "degradation": report.degradation(i),
                })).collect::<Vec<_>>(),
                "estimator_checks": report.checks.iter().map(|c| json!({
                    "graph_ref": c.graph_ref,
                    "model": c.model,
                    "density_matrix": c.density_matrix,
                    "trajectory_mean": c.trajectory_mean,
                    "trajectory_std_err": c.trajectory_se,
                    "z": c.z(),
                })).collect::<Vec<_>>(),
            }));
            Ok(())
        }
    }
}
