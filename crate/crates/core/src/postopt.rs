//! Local improvement of complete solutions.
//!
//! Agents with identical capability footprints form a group. Within a group,
//! every path is 2-opted and single nodes move from the longest to the
//! shortest member path. Between groups, single nodes move from the globally
//! longest path to the shortest path of the group with the smallest inner
//! makespan. Every applied move strictly decreases (makespan, total cost)
//! lexicographically, so the loops terminate and never make things worse.

use crate::instance::{AgentId, MhppInstance, Solution, VertexId};
use crate::weight::Weight;

/// Agents sharing one capability footprint, with their current paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathGroup {
    /// `footprint[v]`: whether members may visit target `v`.
    pub footprint: Vec<bool>,
    /// Member agent ids, ascending.
    pub members: Vec<AgentId>,
    /// `paths[k]` belongs to `members[k]`.
    pub paths: Vec<Vec<VertexId>>,
}

impl PathGroup {
    fn costs<W: Weight>(&self, inst: &MhppInstance<W>) -> Vec<W> {
        self.members.iter().zip(&self.paths).map(|(&a, p)| inst.path_cost(a, p)).collect()
    }

    pub fn makespan<W: Weight>(&self, inst: &MhppInstance<W>) -> W {
        self.costs(inst).into_iter().max().unwrap_or_else(W::zero)
    }
}

/// Partitions agents by capability footprint. Groups are ordered by their
/// smallest member id.
pub fn group_by_type<W: Weight>(inst: &MhppInstance<W>, sol: &Solution<W>) -> Vec<PathGroup> {
    let mut groups: Vec<PathGroup> = Vec::new();
    for agent in 0..inst.num_agents() {
        let fp = inst.footprint(agent);
        let path = sol.paths[agent].clone();
        match groups.iter_mut().find(|g| g.footprint == fp) {
            Some(g) => {
                g.members.push(agent);
                g.paths.push(path);
            }
            None => groups.push(PathGroup { footprint: fp, members: vec![agent], paths: vec![path] }),
        }
    }
    groups
}

/// `total + added - removed`, infinite when anything involved is infinite.
fn splice<W: Weight>(total: W, removed: &[W], added: &[W]) -> W {
    if total.is_infinite() || added.iter().any(|w| w.is_infinite()) {
        return W::infinity();
    }
    let add = added.iter().fold(total, |a, &b| a.guarded_add(b));
    let sub = removed.iter().fold(W::zero(), |a, &b| a.guarded_add(b));
    if add.is_infinite() || sub > add {
        return W::infinity();
    }
    add - sub
}

/// Best-improvement 2-opt with fixed endpoints. Repeats the single most
/// improving segment reversal until none reduces the path cost. Costs are
/// assumed symmetric.
pub fn two_opt<W: Weight>(path: &[VertexId], cost: impl Fn(VertexId, VertexId) -> W) -> Vec<VertexId> {
    let mut p = path.to_vec();
    if p.len() < 4 {
        return p;
    }
    let last = p.len() - 1;
    loop {
        let mut best: Option<(W, usize, usize)> = None;
        for i in 1..last {
            for j in i + 1..last {
                let old = cost(p[i - 1], p[i]).guarded_add(cost(p[j], p[j + 1]));
                let new = cost(p[i - 1], p[j]).guarded_add(cost(p[i], p[j + 1]));
                if new < old {
                    let gain = old - new;
                    if best.is_none_or(|(g, _, _)| gain > g) {
                        best = Some((gain, i, j));
                    }
                }
            }
        }
        match best {
            Some((_, i, j)) => p[i..=j].reverse(),
            None => return p,
        }
    }
}

/// Cheapest place to insert `v` into `path` for `agent`:
/// (position to insert at, new path cost).
fn best_insertion<W: Weight>(inst: &MhppInstance<W>, agent: AgentId, path: &[VertexId], cost: W, v: VertexId) -> Option<(usize, W)> {
    let mut best: Option<(usize, W)> = None;
    for q in 0..path.len() - 1 {
        let (a, b) = (path[q], path[q + 1]);
        let new = splice(cost, &[inst.cost(agent, a, b)], &[inst.cost(agent, a, v), inst.cost(agent, v, b)]);
        if new.is_finite() && best.is_none_or(|(_, c)| new < c) {
            best = Some((q + 1, new));
        }
    }
    best
}

/// Path cost after dropping the interior vertex at `pos`.
fn removal_cost<W: Weight>(inst: &MhppInstance<W>, agent: AgentId, path: &[VertexId], cost: W, pos: usize) -> W {
    let (a, v, b) = (path[pos - 1], path[pos], path[pos + 1]);
    splice(cost, &[inst.cost(agent, a, v), inst.cost(agent, v, b)], &[inst.cost(agent, a, b)])
}

/// Candidate relocation: ranked by (makespan, total, node).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Move<W> {
    makespan: W,
    total: W,
    node: VertexId,
    from_pos: usize,
    to_pos: usize,
}

/// Best relocation of one node from `donor` (agent, path, cost) into
/// `receiver`. `others_max` is the largest cost among all untouched paths
/// that count towards the makespan, `others_total` their sum.
fn best_move<W: Weight>(
    inst: &MhppInstance<W>,
    donor: (AgentId, &[VertexId], W),
    receiver: (AgentId, &[VertexId], W),
    others_max: W,
    others_total: W,
) -> Option<Move<W>> {
    let (da, dp, dc) = donor;
    let (ra, rp, rc) = receiver;
    let mut best: Option<Move<W>> = None;
    for pos in 1..dp.len() - 1 {
        let v = dp[pos];
        if !inst.capable(ra, v) {
            continue;
        }
        let new_d = removal_cost(inst, da, dp, dc, pos);
        let Some((to_pos, new_r)) = best_insertion(inst, ra, rp, rc, v) else {
            continue;
        };
        if new_d.is_infinite() {
            continue;
        }
        let m = Move {
            makespan: others_max.max(new_d).max(new_r),
            total: others_total.guarded_add(new_d).guarded_add(new_r),
            node: v,
            from_pos: pos,
            to_pos,
        };
        if best.is_none_or(|b| m < b) {
            best = Some(m);
        }
    }
    best
}

/// Index of the largest (`max = true`) or smallest cost; ties go to the
/// lowest index.
fn extreme<W: Weight>(costs: &[W], max: bool) -> usize {
    let mut best = 0;
    for (k, &c) in costs.iter().enumerate() {
        if (max && c > costs[best]) || (!max && c < costs[best]) {
            best = k;
        }
    }
    best
}

/// 2-opts every member path, then repeatedly moves the single node from the
/// longest member path to the shortest member path that most reduces the
/// group's (makespan, total cost).
pub fn inner_group_opt<W: Weight>(mut group: PathGroup, inst: &MhppInstance<W>) -> PathGroup {
    loop {
        for (k, p) in group.paths.iter_mut().enumerate() {
            let a = group.members[k];
            *p = two_opt(p, |u, v| inst.cost(a, u, v));
        }
        if group.members.len() < 2 {
            return group;
        }
        let costs = group.costs(inst);
        let long = extreme(&costs, true);
        let short = extreme(&costs, false);
        if long == short {
            return group;
        }
        let cur_max = costs.iter().copied().max().expect("nonempty group");
        let cur_total = costs.iter().fold(W::zero(), |a, &b| a.guarded_add(b));
        let rest: Vec<W> = (0..costs.len()).filter(|&k| k != long && k != short).map(|k| costs[k]).collect();
        let others_max = rest.iter().copied().max().unwrap_or_else(W::zero);
        let others_total = rest.iter().fold(W::zero(), |a, &b| a.guarded_add(b));
        let mv = best_move(
            inst,
            (group.members[long], &group.paths[long], costs[long]),
            (group.members[short], &group.paths[short], costs[short]),
            others_max,
            others_total,
        );
        match mv {
            Some(m) if (m.makespan, m.total) < (cur_max, cur_total) => {
                log::trace!("inner move node {} makespan {} -> {}", m.node, cur_max, m.makespan);
                let v = group.paths[long].remove(m.from_pos);
                group.paths[short].insert(m.to_pos, v);
            }
            _ => return group,
        }
    }
}

/// One inter-group step: moves the best node off the globally longest path
/// onto the shortest path of the other group with the smallest inner
/// makespan. Returns whether a move was applied.
pub fn inter_group_opt<W: Weight>(mut groups: Vec<PathGroup>, inst: &MhppInstance<W>) -> (Vec<PathGroup>, bool) {
    if groups.len() < 2 {
        return (groups, false);
    }
    // Flat view: (group, member, agent, cost) ordered by agent id.
    let mut flat: Vec<(usize, usize, AgentId, W)> = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        for (k, (&a, p)) in g.members.iter().zip(&g.paths).enumerate() {
            flat.push((gi, k, a, inst.path_cost(a, p)));
        }
    }
    flat.sort_by_key(|e| e.2);
    let costs: Vec<W> = flat.iter().map(|e| e.3).collect();
    let (lg, lk, la, lc) = flat[extreme(&costs, true)];

    let recv_group = (0..groups.len())
        .filter(|&gi| gi != lg)
        .min_by_key(|&gi| (groups[gi].makespan(inst), gi))
        .expect("at least two groups");
    let rcosts = groups[recv_group].costs(inst);
    let rk = extreme(&rcosts, false);
    let ra = groups[recv_group].members[rk];
    let rc = rcosts[rk];

    let cur_max = costs.iter().copied().max().expect("nonempty");
    let cur_total = costs.iter().fold(W::zero(), |a, &b| a.guarded_add(b));
    let rest: Vec<W> = flat.iter().filter(|e| e.2 != la && e.2 != ra).map(|e| e.3).collect();
    let others_max = rest.iter().copied().max().unwrap_or_else(W::zero);
    let others_total = rest.iter().fold(W::zero(), |a, &b| a.guarded_add(b));

    let mv = best_move(inst, (la, &groups[lg].paths[lk], lc), (ra, &groups[recv_group].paths[rk], rc), others_max, others_total);
    match mv {
        Some(m) if (m.makespan, m.total) < (cur_max, cur_total) => {
            log::trace!("inter move node {} agent {la} -> {ra}, makespan {cur_max} -> {}", m.node, m.makespan);
            let v = groups[lg].paths[lk].remove(m.from_pos);
            groups[recv_group].paths[rk].insert(m.to_pos, v);
            (groups, true)
        }
        _ => (groups, false),
    }
}

fn assemble<W: Weight>(inst: &MhppInstance<W>, groups: &[PathGroup]) -> Solution<W> {
    let mut paths = vec![Vec::new(); inst.num_agents()];
    for g in groups {
        for (&a, p) in g.members.iter().zip(&g.paths) {
            paths[a] = p.clone();
        }
    }
    Solution::from_paths(inst, paths)
}

/// Inner-group pass per group, inter-group moves until none applies, then a
/// final inner-group pass.
pub fn post_optimize<W: Weight>(inst: &MhppInstance<W>, sol: &Solution<W>) -> Solution<W> {
    let mut groups: Vec<PathGroup> = group_by_type(inst, sol).into_iter().map(|g| inner_group_opt(g, inst)).collect();
    loop {
        let (g, improved) = inter_group_opt(groups, inst);
        groups = g;
        if !improved {
            break;
        }
    }
    let groups: Vec<PathGroup> = groups.into_iter().map(|g| inner_group_opt(g, inst)).collect();
    let out = assemble(inst, &groups);
    let before = Solution::from_paths(inst, sol.paths.clone());
    if (out.makespan, out.total) > (before.makespan, before.total) {
        // Only reachable for inputs with infinite legs.
        return before;
    }
    out
}
