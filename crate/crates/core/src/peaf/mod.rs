//! Anytime focal search for the min-max mHPP.
//!
//! The search runs over labels (joint vertex, per-agent cost vector,
//! visited set) and moves one agent per expansion: the active agent with the
//! smallest cost so far. Labels are ordered by an admissible f-value built
//! from an MST over the unvisited nodes, and expanded from a focal window
//! `[f_min, (1 + eps) f_min]` that prefers labels with more visited nodes.
//!
//! Each complete label is post-optimized and becomes the incumbent if it is
//! strictly better. The search then restarts from the root with a smaller
//! `eps`, pruning every label whose f reaches the incumbent makespan. When a
//! restart drains the open list, the incumbent is optimal.

mod label;
mod queues;
mod space;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::instance::{MhppInstance, Solution};
use crate::postopt::post_optimize;
use crate::weight::Weight;

pub use label::{dominates, FrontierSet, Label};
pub use queues::SearchQueues;
pub use space::SearchSpace;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeafParams {
    pub eps0: f64,
    /// Multiplicative decay applied after every incumbent.
    pub eps_decay: f64,
    /// Below this, eps snaps to 0.
    pub eps_floor: f64,
    pub time_limit: Option<Duration>,
    /// Deterministic budget on label expansions across all restarts.
    pub max_expansions: Option<u64>,
    pub dominance: bool,
    /// Focal tie-break on f after |B|: larger f first when true.
    pub prefer_larger_f: bool,
    pub post_optimize: bool,
}

impl Default for PeafParams {
    fn default() -> Self {
        PeafParams {
            eps0: 0.5,
            eps_decay: 0.5,
            eps_floor: 1e-3,
            time_limit: None,
            max_expansions: None,
            dominance: true,
            prefer_larger_f: true,
            post_optimize: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Open list drained with an incumbent: it is optimal.
    Optimal,
    /// Budget ran out with an incumbent in hand.
    BudgetExhausted,
    /// Open list drained without ever completing a label.
    Infeasible,
    /// Budget ran out before the first incumbent.
    NoSolution,
    /// A one-shot construction finished; no optimality claim.
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incumbent<W> {
    pub makespan: W,
    pub total: W,
    pub at_ms: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub generated: u64,
    pub expanded: u64,
    pub pruned_dominance: u64,
    pub pruned_infeasible: u64,
    pub pruned_bound: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverReport<W> {
    pub status: SolveStatus,
    pub incumbents: Vec<Incumbent<W>>,
    pub best: Option<Solution<W>>,
    pub counters: Counters,
    /// eps used by each restart, in order.
    pub eps_trace: Vec<f64>,
    pub elapsed_ms: f64,
}

impl<W: Weight> SolverReport<W> {
    /// Report for a solver that produces a single solution in one go.
    pub fn single(sol: Solution<W>, status: SolveStatus, elapsed_ms: f64) -> Self {
        SolverReport {
            status,
            incumbents: vec![Incumbent { makespan: sol.makespan, total: sol.total, at_ms: elapsed_ms, eps: 0.0 }],
            best: Some(sol),
            counters: Counters::default(),
            eps_trace: Vec::new(),
            elapsed_ms,
        }
    }

    pub fn time_to_best_ms(&self) -> Option<f64> {
        self.incumbents.last().map(|i| i.at_ms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }
}

/// Runs the search with default observation (none).
pub fn solve<W: Weight>(inst: &MhppInstance<W>, params: &PeafParams) -> SolverReport<W> {
    solve_with(inst, params, |_, _| {})
}

/// Runs the search, calling `on_expand` with every label about to be
/// expanded together with the eps in force.
pub fn solve_with<W: Weight, F>(inst: &MhppInstance<W>, params: &PeafParams, mut on_expand: F) -> SolverReport<W>
where
    F: FnMut(&Label<W>, f64),
{
    let clock = Instant::now();
    let space = SearchSpace::new(inst);
    let mut counters = Counters::default();
    let mut incumbents: Vec<Incumbent<W>> = Vec::new();
    let mut best: Option<Solution<W>> = None;
    let mut eps_trace = Vec::new();
    let mut eps = params.eps0.max(0.0);
    let mut arena: Vec<Label<W>> = Vec::new();
    let mut frontier = FrontierSet::new();

    let out_of_budget = |counters: &Counters| {
        params.time_limit.is_some_and(|t| clock.elapsed() >= t) || params.max_expansions.is_some_and(|m| counters.expanded >= m)
    };

    let status = 'outer: loop {
        if out_of_budget(&counters) {
            break if best.is_some() { SolveStatus::BudgetExhausted } else { SolveStatus::NoSolution };
        }
        eps_trace.push(eps);
        arena.clear();
        frontier.clear();
        let mut queues = SearchQueues::new(eps, params.prefer_larger_f);
        let bound = best.as_ref().map(|s| s.makespan);

        let root = space.root();
        counters.generated += 1;
        if !space.is_feasible(&root) {
            counters.pruned_infeasible += 1;
        } else if bound.is_some_and(|b| root.f >= b) {
            counters.pruned_bound += 1;
        } else {
            queues.push(0, root.f, root.num_visited(), root.g_sum);
            arena.push(root);
        }

        let mut found = None;
        while let Some((idx, _)) = queues.pop() {
            if out_of_budget(&counters) {
                break 'outer if best.is_some() { SolveStatus::BudgetExhausted } else { SolveStatus::NoSolution };
            }
            if params.dominance {
                if frontier.is_dominated(&arena, &arena[idx]) {
                    counters.pruned_dominance += 1;
                    continue;
                }
                frontier.insert_filtered(&arena, idx);
            }
            if space.is_complete(&arena[idx]) {
                found = Some(idx);
                break;
            }
            on_expand(&arena[idx], eps);
            counters.expanded += 1;
            for succ in space.expand(&arena[idx], Some(idx)) {
                counters.generated += 1;
                if !space.is_feasible(&succ) {
                    counters.pruned_infeasible += 1;
                    continue;
                }
                if params.dominance && frontier.is_dominated(&arena, &succ) {
                    counters.pruned_dominance += 1;
                    continue;
                }
                if bound.is_some_and(|b| succ.f >= b) {
                    counters.pruned_bound += 1;
                    continue;
                }
                let id = arena.len();
                queues.push(id, succ.f, succ.num_visited(), succ.g_sum);
                arena.push(succ);
            }
        }

        let Some(idx) = found else {
            break if best.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible };
        };
        let raw = space.extract(&arena, idx);
        let sol = if params.post_optimize { post_optimize(inst, &raw) } else { raw };
        debug_assert!(sol.makespan <= arena[idx].g_max);
        if best.as_ref().is_none_or(|b| sol.makespan < b.makespan) {
            log::debug!("incumbent makespan {} at eps {eps}", sol.makespan);
            incumbents.push(Incumbent {
                makespan: sol.makespan,
                total: sol.total,
                at_ms: clock.elapsed().as_secs_f64() * 1e3,
                eps,
            });
            best = Some(sol);
        }
        counters.restarts += 1;
        eps *= params.eps_decay;
        if eps < params.eps_floor {
            eps = 0.0;
        }
    };

    SolverReport { status, incumbents, best, counters, eps_trace, elapsed_ms: clock.elapsed().as_secs_f64() * 1e3 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{AgentClass, CostMatrix};
    use crate::instance::{validate_solution, Agent, TargetNode};

    fn matrix_instance(n_agents: usize, caps: &[&[usize]], rows: Vec<Vec<u64>>) -> MhppInstance<u64> {
        let nodes = caps.iter().map(|c| TargetNode { cell: None, capable: c.iter().copied().collect() }).collect();
        let agents = (0..n_agents).map(|_| Agent { class: 0, start: None, goal: None }).collect();
        MhppInstance::from_matrices(vec![AgentClass::aerial_vehicle()], nodes, agents, vec![CostMatrix::from_rows(&rows)]).unwrap()
    }

    /// Points on a line: n0 at 1, n1 at 3, start/goal at 0.
    fn line() -> MhppInstance<u64> {
        let pos = [1i64, 3, 0, 0];
        let rows = pos.iter().map(|a| pos.iter().map(|b| (a - b).unsigned_abs()).collect()).collect();
        matrix_instance(1, &[&[0], &[0]], rows)
    }

    #[test]
    fn one_agent_line() {
        let inst = line();
        let params = PeafParams { post_optimize: false, ..Default::default() };
        let rep = solve(&inst, &params);
        assert_eq!(rep.status, SolveStatus::Optimal);
        // Orders: s,n0,n1,g = 1+2+3 = 6; s,n1,n0,g = 3+2+1 = 6. Both optimal.
        let best = rep.best.unwrap();
        assert_eq!(best.makespan, 6);
        assert_eq!(validate_solution(&inst, &best), Ok(6));
    }

    #[test]
    fn forced_partition() {
        // Agent 1 alone may visit node 1; node 0 only agent 0.
        let pos = [2i64, 5, 0, 0, 0, 0];
        let rows = pos.iter().map(|a| pos.iter().map(|b| (a - b).unsigned_abs()).collect()).collect();
        let inst = matrix_instance(2, &[&[0], &[1]], rows);
        let rep = solve(&inst, &PeafParams::default());
        assert_eq!(rep.status, SolveStatus::Optimal);
        let best = rep.best.unwrap();
        assert_eq!(best.paths, vec![vec![2, 0, 4], vec![3, 1, 5]]);
        assert_eq!(best.makespan, 10);
    }

    #[test]
    fn infeasible_instance_reports_infeasible() {
        // Node reachable by nobody.
        let inf = u64::MAX;
        let rows = vec![vec![0, inf, inf], vec![inf, 0, 0], vec![inf, 0, 0]];
        let inst = matrix_instance(1, &[&[0]], rows);
        let rep = solve(&inst, &PeafParams::default());
        assert_eq!(rep.status, SolveStatus::Infeasible);
        assert!(rep.best.is_none());
    }

    #[test]
    fn zero_budget_reports_no_solution() {
        let inst = line();
        let rep = solve(&inst, &PeafParams { max_expansions: Some(0), ..Default::default() });
        assert_eq!(rep.status, SolveStatus::NoSolution);
    }

    #[test]
    fn empty_node_set() {
        let rows = vec![vec![0, 4], vec![4, 0]];
        let inst = matrix_instance(1, &[], rows);
        let rep = solve(&inst, &PeafParams::default());
        assert_eq!(rep.best.unwrap().makespan, 4);
    }

    #[test]
    fn report_json_shape() {
        let rep = solve(&line(), &PeafParams::default());
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        let inc = &v["incumbents"][0];
        for k in ["makespan", "total", "at_ms", "eps"] {
            assert!(inc.get(k).is_some(), "missing {k}");
        }
        assert!(v["counters"]["expanded"].is_u64());
    }
}
