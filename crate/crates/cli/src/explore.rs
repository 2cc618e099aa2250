use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use mhpp::exploresim::{Ablation, EpisodeMetrics, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::usage;

#[derive(Args)]
pub struct ExploreArgs {
    /// Scenario JSON (map, classes, robots, params).
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 5)]
    trials: u64,
    /// Which local-planning components stay on.
    #[arg(long, default_value_t = Ablation::Full)]
    ablate: Ablation,
    /// Hetero-cost gain; a comma separated list runs a sweep.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    /// Seed of the first trial; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tick_cap: Option<u64>,
    /// Directory for metrics, traces and the summary.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub ablation: String,
    pub alpha: f64,
    pub trials: u64,
    pub complete: u64,
    pub mean_ticks: f64,
    pub mean_total_length: f64,
}

pub fn cmd_explore(a: ExploreArgs) -> Result<u8> {
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    if let Some(bad) = a.alpha.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(usage(format!("--alpha {bad} outside [0, 1]")));
    }
    let mut base = Scenario::read(&a.scenario)?;
    let grid = base.load_map(&a.scenario)?;
    a.ablate.apply(&mut base.params);
    if let Some(s) = a.seed {
        base.params.seed = s;
    }
    if let Some(c) = a.tick_cap {
        base.params.tick_cap = c;
    }
    let alphas = if a.alpha.is_empty() { vec![base.params.alpha] } else { a.alpha.clone() };
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    let runs: Vec<(usize, u64)> = (0..alphas.len()).flat_map(|k| (0..a.trials).map(move |t| (k, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build().context("building worker pool")?;
    let results: Vec<Result<EpisodeMetrics>> = pool.install(|| {
        runs.par_iter()
            .map(|&(k, t)| {
                let mut sc = base.clone();
                sc.params.alpha = alphas[k];
                sc.params.seed = base.params.seed + t;
                let ep = sc.run(&grid)?;
                let stem = format!("{}_a{:03}_trial{t}", a.ablate, (alphas[k] * 100.0).round() as u32);
                let json = serde_json::to_string_pretty(&ep.metrics)? + "\n";
                std::fs::write(a.out.join(format!("{stem}.json")), json)?;
                let mut w = csv::Writer::from_path(a.out.join(format!("{stem}_trace.csv")))?;
                for row in &ep.trace {
                    w.serialize(row)?;
                }
                w.flush()?;
                Ok(ep.metrics)
            })
            .collect()
    });

    let mut summary = Vec::new();
    for (k, &alpha) in alphas.iter().enumerate() {
        let ms: Vec<&EpisodeMetrics> = results[k * a.trials as usize..(k + 1) * a.trials as usize]
            .iter()
            .map(|r| r.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")))
            .collect::<Result<_>>()?;
        let n = ms.len() as f64;
        summary.push(SummaryRow {
            ablation: a.ablate.to_string(),
            alpha,
            trials: a.trials,
            complete: ms.iter().filter(|m| m.complete).count() as u64,
            mean_ticks: ms.iter().map(|m| m.ticks as f64).sum::<f64>() / n,
            mean_total_length: ms.iter().map(|m| m.total_length as f64).sum::<f64>() / n / 1000.0,
        });
    }

    let path = a.out.join("summary.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for r in &summary {
        w.serialize(r)?;
    }
    w.flush()?;

    println!("{:<8} {:>6} {:>9} {:>12} {:>14}", "ablation", "alpha", "complete", "mean ticks", "mean length");
    for r in &summary {
        let flag = if r.complete < r.trials { "  INCOMPLETE" } else { "" };
        println!(
            "{:<8} {:>6.2} {:>4}/{:<4} {:>12.1} {:>14.1}{flag}",
            r.ablation, r.alpha, r.complete, r.trials, r.mean_ticks, r.mean_total_length
        );
    }
    println!("summary written to {}", path.display());
    Ok(0)
}
