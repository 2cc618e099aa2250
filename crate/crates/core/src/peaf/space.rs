use fixedbitset::FixedBitSet;

use super::label::Label;
use crate::instance::{AgentSet, MhppInstance, Solution, VertexId};
use crate::weight::Weight;

/// Read-only search context over one instance: successor generation,
/// feasibility checks and the MST heuristic.
#[derive(Debug)]
pub struct SearchSpace<'a, W: Weight> {
    inst: &'a MhppInstance<W>,
    /// min over agents of c^i(u, v), row-major over all vertices.
    min_cost: Vec<W>,
}

impl<'a, W: Weight> SearchSpace<'a, W> {
    pub fn new(inst: &'a MhppInstance<W>) -> Self {
        let n = inst.num_vertices();
        let mut min_cost = vec![W::infinity(); n * n];
        for u in 0..n {
            for v in 0..n {
                min_cost[u * n + v] = (0..inst.num_agents()).map(|i| inst.cost(i, u, v)).min().unwrap_or_else(W::infinity);
            }
        }
        SearchSpace { inst, min_cost }
    }

    pub fn instance(&self) -> &'a MhppInstance<W> {
        self.inst
    }

    #[inline]
    fn cmin(&self, u: VertexId, v: VertexId) -> W {
        self.min_cost[u * self.inst.num_vertices() + v]
    }

    /// l0: every agent at its start, nothing visited, zero cost.
    pub fn root(&self) -> Label<W> {
        let a = self.inst.num_agents();
        let mut l = Label {
            vertex: (0..a).map(|i| self.inst.start(i)).collect(),
            g: vec![W::zero(); a],
            visited: FixedBitSet::with_capacity(self.inst.num_nodes()),
            active: AgentSet::all(a),
            parent: None,
            moved: None,
            g_max: W::zero(),
            g_sum: W::zero(),
            h: W::zero(),
            f: W::zero(),
        };
        self.evaluate(&mut l);
        l
    }

    /// Cost of the minimum spanning tree over the unvisited targets plus one
    /// super-node standing for all agents' current vertices (joined by
    /// zero-cost virtual edges), with each edge priced at the cheapest agent.
    /// `None` when some unvisited node cannot be connected.
    pub fn mst_cost(&self, l: &Label<W>) -> Option<W> {
        let unvisited: Vec<VertexId> = (0..self.inst.num_nodes()).filter(|&v| !l.visited.contains(v)).collect();
        if unvisited.is_empty() {
            return Some(W::zero());
        }
        // Prim from the super-node.
        let mut key: Vec<W> =
            unvisited.iter().map(|&u| l.vertex.iter().map(|&x| self.cmin(x, u)).min().unwrap_or_else(W::infinity)).collect();
        let mut in_tree = vec![false; unvisited.len()];
        let mut total = W::zero();
        for _ in 0..unvisited.len() {
            let (best, w) = key
                .iter()
                .enumerate()
                .filter(|(j, _)| !in_tree[*j])
                .min_by_key(|(_, &w)| w)
                .map(|(j, &w)| (j, w))
                .expect("one node left per round");
            if w.is_infinite() {
                return None;
            }
            in_tree[best] = true;
            total = total.guarded_add(w);
            let b = unvisited[best];
            for (j, &u) in unvisited.iter().enumerate() {
                if !in_tree[j] {
                    let c = self.cmin(b, u);
                    if c < key[j] {
                        key[j] = c;
                    }
                }
            }
        }
        Some(total)
    }

    /// h = MST cost / number of active agents, rounded down. Infinite when
    /// the MST is disconnected.
    pub fn heuristic(&self, l: &Label<W>) -> W {
        match self.mst_cost(l) {
            None => W::infinity(),
            Some(c) => {
                let k = l.active.len();
                if k == 0 {
                    c
                } else {
                    c / W::from_usize(k).expect("agent count fits in the weight type")
                }
            }
        }
    }

    /// Recomputes h, g_max, g_sum and f.
    pub fn evaluate(&self, l: &mut Label<W>) {
        l.h = self.heuristic(l);
        l.refresh();
    }

    pub fn is_complete(&self, l: &Label<W>) -> bool {
        l.active.is_empty() && l.visited.count_ones(..) == self.inst.num_nodes()
    }

    /// Feasibility filter applied to every generated label.
    pub fn is_feasible(&self, l: &Label<W>) -> bool {
        let inst = self.inst;
        if l.vertex.iter().enumerate().any(|(i, &v)| !inst.capable(i, v)) {
            return false;
        }
        let all_visited = l.visited.count_ones(..) == inst.num_nodes();
        if l.active.is_empty() {
            return all_visited;
        }
        // Every unvisited node still needs a capable agent that has not retired.
        let stranded = (0..inst.num_nodes()).any(|v| !l.visited.contains(v) && !inst.nodes()[v].capable.intersects(l.active));
        if stranded {
            return false;
        }
        l.h.is_finite()
    }

    /// The active agent that moves next: smallest cost, then lowest id.
    pub fn next_agent(&self, l: &Label<W>) -> Option<usize> {
        l.active.iter().min_by_key(|&i| (l.g[i], i))
    }

    /// Partial expansion: successors move only [`Self::next_agent`], either to
    /// an unvisited target it may visit or to its goal. The goal move is
    /// offered only when another agent stays active or every node is visited.
    pub fn expand(&self, l: &Label<W>, parent: Option<usize>) -> Vec<Label<W>> {
        let Some(i) = self.next_agent(l) else {
            return Vec::new();
        };
        let inst = self.inst;
        let here = l.vertex[i];
        let mut out = Vec::new();
        for u in 0..inst.num_nodes() {
            if l.visited.contains(u) || !inst.capable(i, u) {
                continue;
            }
            let c = inst.cost(i, here, u);
            if c.is_infinite() {
                continue;
            }
            let mut s = self.child(l, parent, i, u, c);
            s.visited.insert(u);
            self.evaluate(&mut s);
            out.push(s);
        }
        let all_visited = l.visited.count_ones(..) == inst.num_nodes();
        if l.active.len() > 1 || all_visited {
            let goal = inst.goal(i);
            let c = inst.cost(i, here, goal);
            if c.is_finite() {
                let mut s = self.child(l, parent, i, goal, c);
                s.active.remove(i);
                self.evaluate(&mut s);
                out.push(s);
            }
        }
        out
    }

    fn child(&self, l: &Label<W>, parent: Option<usize>, agent: usize, to: VertexId, c: W) -> Label<W> {
        let mut s = l.clone();
        s.vertex[agent] = to;
        s.g[agent] = s.g[agent].guarded_add(c);
        s.parent = parent;
        s.moved = Some((agent, to));
        s
    }

    /// Rebuilds per-agent paths by walking parent links from `idx`.
    pub fn extract(&self, arena: &[Label<W>], idx: usize) -> Solution<W> {
        let mut moves = Vec::new();
        let mut cur = Some(idx);
        while let Some(c) = cur {
            if let Some(m) = arena[c].moved {
                moves.push(m);
            }
            cur = arena[c].parent;
        }
        moves.reverse();
        let mut paths: Vec<Vec<VertexId>> = (0..self.inst.num_agents()).map(|i| vec![self.inst.start(i)]).collect();
        for (agent, v) in moves {
            paths[agent].push(v);
        }
        Solution::from_paths(self.inst, paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{AgentClass, CostMatrix};
    use crate::instance::{Agent, TargetNode};

    /// Instance over explicit symmetric matrices. `caps[v]` lists capable
    /// agents of target v; `rows` is the single shared class matrix.
    pub(crate) fn matrix_instance(n_agents: usize, caps: &[&[usize]], rows: Vec<Vec<u64>>) -> MhppInstance<u64> {
        let nodes = caps.iter().map(|c| TargetNode { cell: None, capable: c.iter().copied().collect() }).collect();
        let agents = (0..n_agents).map(|_| Agent { class: 0, start: None, goal: None }).collect();
        MhppInstance::from_matrices(vec![AgentClass::aerial_vehicle()], nodes, agents, vec![CostMatrix::from_rows(&rows)]).unwrap()
    }

    #[test]
    fn all_visited_gives_zero_heuristic() {
        // 1 node, 1 agent: vertices n0, s0, g0.
        let inst = matrix_instance(1, &[&[0]], vec![vec![0, 7, 7], vec![7, 0, 0], vec![7, 0, 0]]);
        let sp = SearchSpace::new(&inst);
        let mut l = sp.root();
        assert_eq!(l.h, 7);
        l.visited.insert(0);
        assert_eq!(sp.heuristic(&l), 0);
    }

    #[test]
    fn single_edge_mst() {
        let inst = matrix_instance(1, &[&[0]], vec![vec![0, 7, 9], vec![7, 0, 3], vec![9, 3, 0]]);
        let sp = SearchSpace::new(&inst);
        assert_eq!(sp.heuristic(&sp.root()), 7);
    }

    /// Enumerates every spanning tree of the contracted graph via edge
    /// subsets and returns the cheapest.
    fn exhaustive_mst(nodes: usize, w: &dyn Fn(usize, usize) -> u64) -> u64 {
        let edges: Vec<(usize, usize)> = (0..nodes).flat_map(|a| (a + 1..nodes).map(move |b| (a, b))).collect();
        let mut best = u64::MAX;
        for mask in 0u32..(1 << edges.len()) {
            if mask.count_ones() as usize != nodes - 1 {
                continue;
            }
            let mut parent: Vec<usize> = (0..nodes).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            let mut ok = true;
            let mut cost = 0;
            for (e, &(a, b)) in edges.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra == rb {
                        ok = false;
                        break;
                    }
                    parent[ra] = rb;
                    cost += w(a, b);
                }
            }
            if ok {
                best = best.min(cost);
            }
        }
        best
    }

    #[test]
    fn mst_matches_spanning_tree_enumeration() {
        // 3 targets, 2 agents: vertices n0 n1 n2 s0 s1 g0 g1.
        let rows = vec![
            vec![0, 4, 9, 5, 8, 5, 8],
            vec![4, 0, 6, 7, 3, 7, 3],
            vec![9, 6, 0, 2, 10, 2, 10],
            vec![5, 7, 2, 0, 11, 0, 11],
            vec![8, 3, 10, 11, 0, 11, 0],
            vec![5, 7, 2, 0, 11, 0, 11],
            vec![8, 3, 10, 11, 0, 11, 0],
        ];
        let inst = matrix_instance(2, &[&[0, 1], &[0, 1], &[0, 1]], rows.clone());
        let sp = SearchSpace::new(&inst);
        let root = sp.root();
        // Contracted graph: 0 = super-node {s0, s1}, 1..=3 = targets.
        let w = |a: usize, b: usize| -> u64 {
            let real = |x: usize| x - 1;
            match (a, b) {
                (0, t) | (t, 0) => rows[3][real(t)].min(rows[4][real(t)]),
                (x, y) => rows[real(x)][real(y)],
            }
        };
        let oracle = exhaustive_mst(4, &w);
        assert_eq!(sp.mst_cost(&root), Some(oracle));
        assert_eq!(root.h, oracle / 2);
    }

    #[test]
    fn expansion_moves_cheapest_agent_only() {
        let rows = vec![
            vec![0, 4, 1, 3, 1, 3],
            vec![4, 0, 2, 2, 2, 2],
            vec![1, 2, 0, 5, 0, 5],
            vec![3, 2, 5, 0, 5, 0],
            vec![1, 2, 0, 5, 0, 5],
            vec![3, 2, 5, 0, 5, 0],
        ];
        let inst = matrix_instance(2, &[&[0, 1], &[0, 1]], rows);
        let sp = SearchSpace::new(&inst);
        let mut l = sp.root();
        l.g = vec![10, 4];
        l.refresh();
        let succ = sp.expand(&l, None);
        assert!(succ.iter().all(|s| s.moved.unwrap().0 == 1));
        // Two target moves plus the goal move (agent 0 stays active).
        assert_eq!(succ.len(), 3);
    }

    #[test]
    fn last_agent_with_everything_visited_only_goes_home() {
        let inst = matrix_instance(1, &[&[0]], vec![vec![0, 7, 7], vec![7, 0, 0], vec![7, 0, 0]]);
        let sp = SearchSpace::new(&inst);
        let succ = sp.expand(&sp.root(), None);
        assert_eq!(succ.len(), 1);
        let next = sp.expand(&succ[0], None);
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].moved, Some((0, inst.goal(0))));
        assert!(sp.is_complete(&next[0]));
        assert!(sp.is_feasible(&next[0]));
    }

    #[test]
    fn sole_incapable_agent_has_no_successors() {
        // Node 0 only for agent 1; agent 1 already retired.
        let rows = vec![
            vec![0, 1, 1, 1, 1],
            vec![1, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0],
        ];
        let inst = matrix_instance(2, &[&[1]], rows);
        let sp = SearchSpace::new(&inst);
        let mut l = sp.root();
        l.vertex[1] = inst.goal(1);
        l.active.remove(1);
        assert!(sp.expand(&l, None).is_empty());
        assert!(!sp.is_feasible(&l));
    }

    #[test]
    fn feasibility_rules() {
        let rows = vec![vec![0, 1, 1, 1, 1], vec![1, 0, 0, 0, 0], vec![1, 0, 0, 0, 0], vec![1, 0, 0, 0, 0], vec![1, 0, 0, 0, 0]];
        let inst = matrix_instance(2, &[&[0, 1]], rows);
        let sp = SearchSpace::new(&inst);
        // Everyone home with node 0 unvisited.
        let mut l = sp.root();
        l.vertex = vec![inst.goal(0), inst.goal(1)];
        l.active = AgentSet::empty();
        assert!(!sp.is_feasible(&l));
        l.visited.insert(0);
        assert!(sp.is_feasible(&l));
        assert!(sp.is_complete(&l));
    }

    #[test]
    fn av_only_node_with_only_gv_active_is_infeasible() {
        let rows = vec![vec![0, 1, 1, 1, 1], vec![1, 0, 0, 0, 0], vec![1, 0, 0, 0, 0], vec![1, 0, 0, 0, 0], vec![1, 0, 0, 0, 0]];
        // agent 0 = GV, agent 1 = AV; node 0 is AV-only and AV already home.
        let inst = matrix_instance(2, &[&[1]], rows);
        let sp = SearchSpace::new(&inst);
        let mut l = sp.root();
        l.vertex[1] = inst.goal(1);
        l.active.remove(1);
        sp.evaluate(&mut l);
        assert!(!sp.is_feasible(&l));
    }
}
