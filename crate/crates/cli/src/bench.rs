use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use mhpp::instance::generate_random_instance;
use mhpp::instance::io::read_map;
use mhpp::Instance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::run::{solve, status_name};
use crate::{fleet, usage, Algo, Goals, Preset, SolverOpts};

#[derive(Args)]
pub struct BenchArgs {
    /// MovingAI maps, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    maps: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Preset::Desk)]
    preset: Preset,
    /// Overrides the preset node count.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    gv: Option<usize>,
    #[arg(long)]
    av: Option<usize>,
    #[arg(long, default_value_t = 30)]
    seeds: u64,
    /// First seed of the sweep.
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::B1, Algo::B2, Algo::Peaf])]
    algos: Vec<Algo>,
    #[arg(long, value_enum, default_value_t = Goals::Return)]
    goals: Goals,
    #[command(flatten)]
    solver: SolverOpts,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
}

/// One CSV row. Missing solutions leave makespan, total and time empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub map: String,
    pub setting: String,
    pub seed: u64,
    pub algo: String,
    pub makespan: Option<u64>,
    pub total: Option<u64>,
    pub time_to_best_ms: Option<f64>,
    pub status: String,
}

fn run_cell(inst: &Result<Instance, String>, algo: Algo, opts: &SolverOpts) -> (Option<u64>, Option<u64>, Option<f64>, String) {
    let inst = match inst {
        Ok(i) => i,
        Err(e) => return (None, None, None, format!("generation-error: {e}")),
    };
    match solve(inst, algo, opts) {
        Ok(rep) => {
            let t = rep.time_to_best_ms().map(|t| (t * 1e3).round() / 1e3);
            match rep.best {
                Some(s) => (Some(s.makespan), Some(s.total), t, status_name(rep.status).into()),
                None => (None, None, None, status_name(rep.status).into()),
            }
        }
        Err(e) => (None, None, None, format!("error: {e}")),
    }
}

pub fn cmd_bench(a: BenchArgs) -> Result<u8> {
    if a.algos.is_empty() {
        return Err(usage("--algos needs at least one algorithm"));
    }
    if a.seeds == 0 {
        return Err(usage("--seeds must be positive"));
    }
    let (pn, pg, pa) = a.preset.shape();
    let (nodes, gv, av) = (a.nodes.unwrap_or(pn), a.gv.unwrap_or(pg), a.av.unwrap_or(pa));
    let setting = if (nodes, gv, av) == (pn, pg, pa) { a.preset.name().to_string() } else { format!("n{nodes}-gv{gv}-av{av}") };
    let fleet = fleet(gv, av);

    let mut grids = Vec::new();
    for m in &a.maps {
        let name = m.file_stem().map_or_else(|| m.display().to_string(), |s| s.to_string_lossy().into_owned());
        grids.push((name, read_map(m)?));
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build().context("building worker pool")?;
    let cells: Vec<(usize, u64)> = (0..grids.len()).flat_map(|g| (a.seed_base..a.seed_base + a.seeds).map(move |s| (g, s))).collect();
    let rows: Vec<BenchRow> = pool.install(|| {
        cells
            .par_iter()
            .flat_map_iter(|&(g, seed)| {
                let (name, grid) = &grids[g];
                let inst = generate_random_instance(grid, nodes, &fleet, seed, a.goals.into()).map_err(|e| e.to_string());
                let rows: Vec<BenchRow> = a
                    .algos
                    .iter()
                    .map(|&algo| {
                        let (makespan, total, time_to_best_ms, status) = run_cell(&inst, algo, &a.solver);
                        BenchRow { map: name.clone(), setting: setting.clone(), seed, algo: algo.name().into(), makespan, total, time_to_best_ms, status }
                    })
                    .collect();
                rows
            })
            .collect()
    });

    let mut w = csv::Writer::from_path(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;

    print!("{}", summary(&rows));
    println!("{} rows written to {}", rows.len(), a.out.display());
    Ok(0)
}

/// Per map and algorithm averages over runs that produced a solution.
pub fn summary(rows: &[BenchRow]) -> String {
    #[derive(Default)]
    struct Acc {
        runs: usize,
        solved: usize,
        makespan: f64,
        total: f64,
        time: f64,
    }
    let mut order: Vec<(String, String)> = Vec::new();
    let mut acc: BTreeMap<(String, String), Acc> = BTreeMap::new();
    for r in rows {
        let key = (r.map.clone(), r.algo.clone());
        if !acc.contains_key(&key) {
            order.push(key.clone());
        }
        let e = acc.entry(key).or_default();
        e.runs += 1;
        if let (Some(m), Some(t)) = (r.makespan, r.total) {
            e.solved += 1;
            e.makespan += m as f64;
            e.total += t as f64;
            e.time += r.time_to_best_ms.unwrap_or(0.0);
        }
    }
    let mut out = format!("{:<16} {:<8} {:>7} {:>12} {:>12} {:>10}\n", "map", "algo", "solved", "max length", "total length", "time (s)");
    for key in order {
        let e = &acc[&key];
        let avg = |x: f64| if e.solved > 0 { x / e.solved as f64 } else { f64::NAN };
        out += &format!(
            "{:<16} {:<8} {:>3}/{:<3} {:>12.1} {:>12.1} {:>10.3}\n",
            key.0,
            key.1,
            e.solved,
            e.runs,
            avg(e.makespan),
            avg(e.total),
            avg(e.time) / 1e3
        );
    }
    out
}
