//! Reference solvers: greedy construction (B1), greedy plus post-optimization
//! (B2), and an exact oracle for small instances.

use thiserror::Error;

use crate::instance::{AgentId, MhppInstance, Solution, VertexId};
use crate::postopt::post_optimize;
use crate::weight::Weight;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("node {0} cannot be appended to any capable agent's path")]
    Infeasible(VertexId),
    #[error("instance too large for the oracle: {nodes} nodes / {agents} agents (limits {max_nodes} / {max_agents})")]
    TooLarge { nodes: usize, agents: usize, max_nodes: usize, max_agents: usize },
    #[error("no assignment visits every node with finite cost")]
    NoSolution,
}

/// Default oracle size guard.
pub const ORACLE_MAX_NODES: usize = 10;
pub const ORACLE_MAX_AGENTS: usize = 3;

/// Greedy construction: repeatedly appends the (node, agent) pair whose
/// append gives the smallest makespan of the completed solution (every path
/// closed with its goal leg). Ties: lower node id, then lower agent id.
pub fn greedy_b1<W: Weight>(inst: &MhppInstance<W>) -> Result<Solution<W>, BaselineError> {
    let na = inst.num_agents();
    let mut paths: Vec<Vec<VertexId>> = (0..na).map(|i| vec![inst.start(i)]).collect();
    let mut g: Vec<W> = vec![W::zero(); na];
    let mut open: Vec<VertexId> = (0..inst.num_nodes()).collect();
    let closed = |i: AgentId, g: W, last: VertexId| g.guarded_add(inst.cost(i, last, inst.goal(i)));

    while !open.is_empty() {
        let done: Vec<W> = (0..na).map(|i| closed(i, g[i], *paths[i].last().expect("nonempty"))).collect();
        // Largest and second largest completed cost, for "max over the others".
        let mut top = (W::zero(), usize::MAX, W::zero());
        for (i, &d) in done.iter().enumerate() {
            if top.1 == usize::MAX || d > top.0 {
                top = (d, i, top.0);
            } else if d > top.2 {
                top.2 = d;
            }
        }
        let mut best: Option<(W, VertexId, AgentId, usize)> = None;
        for (k, &v) in open.iter().enumerate() {
            for i in 0..na {
                if !inst.capable(i, v) {
                    continue;
                }
                let last = *paths[i].last().expect("nonempty");
                let mine = closed(i, g[i].guarded_add(inst.cost(i, last, v)), v);
                if mine.is_infinite() {
                    continue;
                }
                let others = if top.1 == i { top.2 } else { top.0 };
                let mk = mine.max(others);
                if best.is_none_or(|b| (mk, v, i) < (b.0, b.1, b.2)) {
                    best = Some((mk, v, i, k));
                }
            }
        }
        match best {
            Some((_, v, i, k)) => {
                let last = *paths[i].last().expect("nonempty");
                g[i] = g[i].guarded_add(inst.cost(i, last, v));
                paths[i].push(v);
                open.remove(k);
            }
            None => return Err(BaselineError::Infeasible(open[0])),
        }
    }
    for (i, p) in paths.iter_mut().enumerate() {
        p.push(inst.goal(i));
    }
    let sol = Solution::from_paths(inst, paths);
    if sol.makespan.is_infinite() {
        // Only possible when some start cannot reach its own goal.
        return Err(BaselineError::NoSolution);
    }
    Ok(sol)
}

/// B1 followed by post-optimization.
pub fn greedy_b2<W: Weight>(inst: &MhppInstance<W>) -> Result<Solution<W>, BaselineError> {
    Ok(post_optimize(inst, &greedy_b1(inst)?))
}

/// Exact optimum with the default size guard.
pub fn brute_force_oracle<W: Weight>(inst: &MhppInstance<W>) -> Result<Solution<W>, BaselineError> {
    brute_force_oracle_with_limits(inst, ORACLE_MAX_NODES, ORACLE_MAX_AGENTS)
}

pub fn brute_force_oracle_with_limits<W: Weight>(
    inst: &MhppInstance<W>,
    max_nodes: usize,
    max_agents: usize,
) -> Result<Solution<W>, BaselineError> {
    let (nodes, agents) = (inst.num_nodes(), inst.num_agents());
    if nodes > max_nodes || agents > max_agents || nodes > 20 {
        return Err(BaselineError::TooLarge { nodes, agents, max_nodes, max_agents });
    }
    let starts: Vec<Option<(VertexId, W)>> = (0..agents).map(|i| Some((inst.start(i), W::zero()))).collect();
    let remaining: Vec<VertexId> = (0..nodes).collect();
    let (_, tails) = optimal_completion(inst, &starts, &remaining).ok_or(BaselineError::NoSolution)?;
    let paths = tails
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut p = vec![inst.start(i)];
            p.extend(t);
            p
        })
        .collect();
    Ok(Solution::from_paths(inst, paths))
}

/// Per-agent Held-Karp table: `cost[mask]` is the cheapest walk from the
/// agent's position through exactly the nodes in `mask` to its goal.
struct SubsetTours<W> {
    cost: Vec<W>,
    last: Vec<Vec<(W, usize)>>,
}

fn subset_tours<W: Weight>(inst: &MhppInstance<W>, agent: AgentId, from: VertexId, nodes: &[VertexId]) -> SubsetTours<W> {
    let k = nodes.len();
    let full = 1usize << k;
    let inf = W::infinity();
    let c = |u: VertexId, v: VertexId| inst.cost(agent, u, v);
    // last[mask][j]: cheapest walk from `from` over mask ending at nodes[j],
    // with the predecessor index (usize::MAX for `from`).
    let mut last = vec![vec![(inf, usize::MAX); k]; full];
    for j in 0..k {
        last[1 << j][j] = (c(from, nodes[j]), usize::MAX);
    }
    for mask in 1..full {
        for j in 0..k {
            if mask & (1 << j) == 0 || last[mask][j].0.is_infinite() {
                continue;
            }
            let base = last[mask][j].0;
            for n in 0..k {
                if mask & (1 << n) != 0 {
                    continue;
                }
                let next = mask | (1 << n);
                let cand = base.guarded_add(c(nodes[j], nodes[n]));
                if cand < last[next][n].0 {
                    last[next][n] = (cand, j);
                }
            }
        }
    }
    let goal = inst.goal(agent);
    let mut cost = vec![inf; full];
    cost[0] = c(from, goal);
    for (mask, row) in last.iter().enumerate().skip(1) {
        cost[mask] = row.iter().enumerate().map(|(j, &(g, _))| g.guarded_add(c(nodes[j], goal))).min().unwrap_or(inf);
    }
    SubsetTours { cost, last }
}

impl<W: Weight> SubsetTours<W> {
    fn order(&self, inst: &MhppInstance<W>, agent: AgentId, nodes: &[VertexId], mask: usize) -> Vec<VertexId> {
        if mask == 0 {
            return Vec::new();
        }
        let goal = inst.goal(agent);
        let mut j = (0..nodes.len())
            .filter(|&j| mask & (1 << j) != 0)
            .min_by_key(|&j| self.last[mask][j].0.guarded_add(inst.cost(agent, nodes[j], goal)))
            .expect("nonempty mask");
        let mut m = mask;
        let mut rev = Vec::new();
        loop {
            rev.push(nodes[j]);
            let p = self.last[m][j].1;
            m &= !(1 << j);
            if p == usize::MAX {
                break;
            }
            j = p;
        }
        rev.reverse();
        rev
    }
}

/// Optimal way to finish a partial plan. `agents[i]` is `Some((vertex, g))`
/// for an agent still en route (at `vertex` with cost `g` so far) and `None`
/// for one that has already reached its goal. Returns the optimal makespan
/// and, per agent, the remaining vertices including the goal (empty for
/// retired agents). Retired agents contribute nothing to the makespan; the
/// caller accounts for their costs.
pub fn optimal_completion<W: Weight>(
    inst: &MhppInstance<W>,
    agents: &[Option<(VertexId, W)>],
    remaining: &[VertexId],
) -> Option<(W, Vec<Vec<VertexId>>)> {
    let k = remaining.len();
    assert!(k <= 20, "completion oracle limited to 20 nodes");
    let full = 1usize << k;
    let inf = W::infinity();

    let tours: Vec<Option<SubsetTours<W>>> = agents
        .iter()
        .enumerate()
        .map(|(i, a)| a.map(|(v, _)| subset_tours(inst, i, v, remaining)))
        .collect();
    // Nodes each agent may take at all.
    let allowed: Vec<usize> = (0..agents.len())
        .map(|i| (0..k).filter(|&j| inst.capable(i, remaining[j])).fold(0, |m, j| m | (1 << j)))
        .collect();
    let own = |i: usize, sub: usize| -> W {
        match (&tours[i], agents[i]) {
            (Some(t), Some((_, g))) if sub & !allowed[i] == 0 => g.guarded_add(t.cost[sub]),
            (None, None) if sub == 0 => W::zero(),
            _ => inf,
        }
    };

    // best[a][mask]: optimal makespan of agents 0..=a covering exactly mask.
    let na = agents.len();
    let mut best = vec![vec![inf; full]; na];
    let mut choice = vec![vec![0usize; full]; na];
    for mask in 0..full {
        best[0][mask] = own(0, mask);
        choice[0][mask] = mask;
    }
    for a in 1..na {
        for mask in 0..full {
            // Enumerate submasks given to agent a.
            let mut sub = mask;
            loop {
                let rest = best[a - 1][mask & !sub];
                if rest.is_finite() {
                    let mine = own(a, sub);
                    let v = rest.max(mine);
                    if v < best[a][mask] {
                        best[a][mask] = v;
                        choice[a][mask] = sub;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
    }
    let mk = best[na - 1][full - 1];
    if mk.is_infinite() {
        return None;
    }
    let mut out = vec![Vec::new(); na];
    let mut mask = full - 1;
    for a in (0..na).rev() {
        let sub = choice[a][mask];
        if let Some(t) = &tours[a] {
            out[a] = t.order(inst, a, remaining, sub);
            out[a].push(inst.goal(a));
        }
        mask &= !sub;
    }
    Some((mk, out))
}
