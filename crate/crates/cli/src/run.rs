use std::time::Instant;

use anyhow::Result;
use mhpp::baselines::{brute_force_oracle, greedy_b1, greedy_b2, BaselineError};
use mhpp::peaf::{solve as peaf_solve, Counters, PeafParams, SolveStatus};
use mhpp::{Instance, Solution, SolverReport};

use crate::{time_limit, usage, Algo, SolverOpts};

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::BudgetExhausted => "budget-exhausted",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::NoSolution => "no-solution",
        SolveStatus::Heuristic => "heuristic",
    }
}

pub fn peaf_params(opts: &SolverOpts) -> PeafParams {
    PeafParams {
        eps0: opts.eps0,
        eps_decay: opts.eps_decay,
        time_limit: time_limit(opts),
        max_expansions: opts.expansions,
        dominance: !opts.no_dominance,
        post_optimize: !opts.no_post_opt,
        ..PeafParams::default()
    }
}

fn infeasible(elapsed_ms: f64) -> SolverReport {
    SolverReport {
        status: SolveStatus::Infeasible,
        incumbents: Vec::new(),
        best: None,
        counters: Counters::default(),
        eps_trace: Vec::new(),
        elapsed_ms,
    }
}

/// Runs one algorithm. Only an oversized oracle request is an error; an
/// infeasible instance comes back as a report without a solution.
pub fn solve(inst: &Instance, algo: Algo, opts: &SolverOpts) -> Result<SolverReport> {
    if algo == Algo::Peaf {
        return Ok(peaf_solve(inst, &peaf_params(opts)));
    }
    let clock = Instant::now();
    let (res, status): (Result<Solution, BaselineError>, _) = match algo {
        Algo::B1 => (greedy_b1(inst), SolveStatus::Heuristic),
        Algo::B2 => (greedy_b2(inst), SolveStatus::Heuristic),
        _ => (brute_force_oracle(inst), SolveStatus::Optimal),
    };
    let ms = clock.elapsed().as_secs_f64() * 1e3;
    match res {
        Ok(sol) => Ok(SolverReport::single(sol, status, ms)),
        Err(e @ BaselineError::TooLarge { .. }) => Err(usage(e.to_string())),
        Err(_) => Ok(infeasible(ms)),
    }
}
