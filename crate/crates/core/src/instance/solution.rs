use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AgentId, MhppInstance, VertexId};
use crate::weight::Weight;

/// One vertex path per agent, each from its start vertex to its goal vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution<W> {
    pub paths: Vec<Vec<VertexId>>,
    pub makespan: W,
    pub total: W,
}

impl<W: Weight> Solution<W> {
    /// Wraps paths and computes makespan and total cost from the instance.
    pub fn from_paths(inst: &MhppInstance<W>, paths: Vec<Vec<VertexId>>) -> Self {
        let costs: Vec<W> = paths.iter().enumerate().map(|(i, p)| inst.path_cost(i, p)).collect();
        let makespan = costs.iter().copied().max().unwrap_or_else(W::zero);
        let total = costs.iter().fold(W::zero(), |a, &c| a.guarded_add(c));
        Solution { paths, makespan, total }
    }

    pub fn path_costs(&self, inst: &MhppInstance<W>) -> Vec<W> {
        self.paths.iter().enumerate().map(|(i, p)| inst.path_cost(i, p)).collect()
    }

    /// Target nodes only, per agent, in visiting order.
    pub fn node_sequences(&self, inst: &MhppInstance<W>) -> Vec<Vec<VertexId>> {
        self.paths.iter().map(|p| p.iter().copied().filter(|&v| inst.is_target(v)).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("solution has {found} paths for {expected} agents")]
    AgentCount { expected: usize, found: usize },
    #[error("path of agent {agent} does not run from its start to its goal")]
    Endpoint { agent: AgentId },
    #[error("path of agent {agent} contains foreign vertex {vertex}")]
    ForeignVertex { agent: AgentId, vertex: VertexId },
    #[error("node {node} visited more than once (agent {agent})")]
    NodeRepeated { node: VertexId, agent: AgentId },
    #[error("node {node} unvisited")]
    NodeUnvisited { node: VertexId },
    #[error("assignment violated: agent {agent} cannot visit node {node}")]
    AssignmentViolated { node: VertexId, agent: AgentId },
    #[error("agent {agent} uses unreachable edge {from} -> {to}")]
    InfiniteCost { agent: AgentId, from: VertexId, to: VertexId },
}

/// Checks partition, assignment, endpoint and finiteness constraints and
/// returns the makespan recomputed from the cost matrices.
pub fn validate_solution<W: Weight>(inst: &MhppInstance<W>, sol: &Solution<W>) -> Result<W, Violation> {
    let n_agents = inst.num_agents();
    if sol.paths.len() != n_agents {
        return Err(Violation::AgentCount { expected: n_agents, found: sol.paths.len() });
    }
    for (i, p) in sol.paths.iter().enumerate() {
        if p.len() < 2 || p[0] != inst.start(i) || p[p.len() - 1] != inst.goal(i) {
            return Err(Violation::Endpoint { agent: i });
        }
        if let Some(&v) = p[1..p.len() - 1].iter().find(|&&v| !inst.is_target(v)) {
            return Err(Violation::ForeignVertex { agent: i, vertex: v });
        }
    }
    let mut seen = vec![false; inst.num_nodes()];
    for (i, p) in sol.paths.iter().enumerate() {
        for &v in &p[1..p.len() - 1] {
            if std::mem::replace(&mut seen[v], true) {
                return Err(Violation::NodeRepeated { node: v, agent: i });
            }
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Violation::NodeUnvisited { node: v });
    }
    for (i, p) in sol.paths.iter().enumerate() {
        if let Some(&v) = p.iter().find(|&&v| !inst.capable(i, v)) {
            return Err(Violation::AssignmentViolated { node: v, agent: i });
        }
    }
    let mut makespan = W::zero();
    for (i, p) in sol.paths.iter().enumerate() {
        let mut c = W::zero();
        for e in p.windows(2) {
            let w = inst.cost(i, e[0], e[1]);
            if w.is_infinite() {
                return Err(Violation::InfiniteCost { agent: i, from: e[0], to: e[1] });
            }
            c = c.guarded_add(w);
        }
        makespan = makespan.max(c);
    }
    Ok(makespan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{AgentClass, Cell, TerrainGrid};
    use crate::instance::AgentSet;

    /// Ground line `..S..` with both agents based at x=0.
    fn inst() -> MhppInstance<u64> {
        let grid = TerrainGrid::from_rows(&["..S.."]).unwrap();
        MhppInstance::from_grid(
            &grid,
            vec![AgentClass::ground_vehicle(), AgentClass::aerial_vehicle()],
            vec![(Cell::new(1, 0), AgentSet::all(2)), (Cell::new(2, 0), AgentSet::single(1)), (Cell::new(3, 0), AgentSet::all(2))],
            vec![(0, Cell::new(0, 0), Cell::new(0, 0)), (1, Cell::new(0, 0), Cell::new(0, 0))],
        )
        .unwrap()
    }

    #[test]
    fn valid_two_agent_solution() {
        let inst = inst();
        // GV: start -> n0 -> goal = 1000 + 1000. AV: start -> n1 -> n2 -> goal = 2000 + 1000 + 3000.
        let paths = vec![vec![3, 0, 5], vec![4, 1, 2, 6]];
        let sol = Solution::from_paths(&inst, paths);
        let hand: u64 = 2000 + 1000 + 3000;
        assert_eq!(validate_solution(&inst, &sol), Ok(hand));
        assert_eq!(sol.total, 2000 + 6000);
    }

    #[test]
    fn recomputes_makespan_ignoring_stored_value() {
        let inst = inst();
        let mut sol = Solution::from_paths(&inst, vec![vec![3, 0, 5], vec![4, 1, 2, 6]]);
        sol.makespan = 1;
        assert_eq!(validate_solution(&inst, &sol), Ok(6000));
    }

    #[test]
    fn unvisited_node() {
        let inst = inst();
        let sol = Solution::from_paths(&inst, vec![vec![3, 0, 5], vec![4, 1, 6]]);
        assert_eq!(validate_solution(&inst, &sol), Err(Violation::NodeUnvisited { node: 2 }));
    }

    #[test]
    fn assignment_violated() {
        let inst = inst();
        let sol = Solution { paths: vec![vec![3, 0, 1, 5], vec![4, 2, 6]], makespan: 0, total: 0 };
        assert_eq!(validate_solution(&inst, &sol), Err(Violation::AssignmentViolated { node: 1, agent: 0 }));
    }

    #[test]
    fn structural_violations() {
        let inst = inst();
        let bad_count = Solution { paths: vec![vec![3, 0, 1, 2, 5]], makespan: 0, total: 0 };
        assert!(matches!(validate_solution(&inst, &bad_count), Err(Violation::AgentCount { .. })));
        let bad_end = Solution { paths: vec![vec![3, 0, 4], vec![4, 1, 2, 6]], makespan: 0, total: 0 };
        assert_eq!(validate_solution(&inst, &bad_end), Err(Violation::Endpoint { agent: 0 }));
        let foreign = Solution { paths: vec![vec![3, 4, 0, 5], vec![4, 1, 2, 6]], makespan: 0, total: 0 };
        assert!(matches!(validate_solution(&inst, &foreign), Err(Violation::ForeignVertex { .. })));
        let twice = Solution { paths: vec![vec![3, 0, 5], vec![4, 1, 0, 2, 6]], makespan: 0, total: 0 };
        assert_eq!(validate_solution(&inst, &twice), Err(Violation::NodeRepeated { node: 0, agent: 1 }));
    }
}
