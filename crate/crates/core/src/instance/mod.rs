//! Min-max mHPP instances: target nodes with capable-agent sets, agents
//! with start and goal vertices, and per-class edge costs.
//!
//! Vertex ids are laid out as `0..N` for target nodes, `N..N+A` for agent
//! starts and `N+A..N+2A` for agent goals. Starts and goals are separate
//! vertices even when an agent returns to its own start cell.

mod agentset;
mod generate;
pub mod io;
mod solution;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{build_cost_matrices, AgentClass, Cell, CostMatrix, MapError, TerrainGrid};
use crate::weight::Weight;

pub use agentset::{AgentSet, MAX_AGENTS};
pub use generate::{generate_random_instance, GoalMode};
pub use solution::{validate_solution, Solution, Violation};

pub type AgentId = usize;
pub type VertexId = usize;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("node {0} has no capable agent")]
    NoCapableAgent(usize),
    #[error("node {node} lists agent {agent}, but only {agents} agents exist")]
    UnknownAgent { node: usize, agent: usize, agents: usize },
    #[error("agent {agent} uses class {class}, but only {classes} classes exist")]
    UnknownClass { agent: usize, class: usize, classes: usize },
    #[error("at most {MAX_AGENTS} agents are supported, got {0}")]
    TooManyAgents(usize),
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("cost matrix for class {class} has size {found}, expected {expected}")]
    MatrixSize { class: usize, expected: usize, found: usize },
    #[error("cost matrix for class {0} is not symmetric")]
    Asymmetric(usize),
    #[error("instance generation failed: {0}")]
    Generation(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed instance document: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetNode {
    pub cell: Option<Cell>,
    pub capable: AgentSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub class: usize,
    pub start: Option<Cell>,
    pub goal: Option<Cell>,
}

/// An immutable mHPP instance with its cost matrices.
#[derive(Debug, Clone)]
pub struct MhppInstance<W: Weight> {
    map: Option<String>,
    seed: Option<u64>,
    classes: Vec<AgentClass>,
    nodes: Vec<TargetNode>,
    agents: Vec<Agent>,
    matrices: Vec<CostMatrix<W>>,
}

impl<W: Weight> MhppInstance<W> {
    /// Builds an instance whose costs are grid shortest paths between the
    /// node, start and goal cells.
    pub fn from_grid(
        grid: &TerrainGrid,
        classes: Vec<AgentClass>,
        nodes: Vec<(Cell, AgentSet)>,
        agents: Vec<(usize, Cell, Cell)>,
    ) -> Result<Self, InstanceError> {
        let mut cells: Vec<Cell> = nodes.iter().map(|n| n.0).collect();
        cells.extend(agents.iter().map(|a| a.1));
        cells.extend(agents.iter().map(|a| a.2));
        for (i, a) in agents.iter().enumerate() {
            if a.0 >= classes.len() {
                return Err(InstanceError::UnknownClass { agent: i, class: a.0, classes: classes.len() });
            }
        }
        let matrices = build_cost_matrices::<W>(grid, &cells, &classes)?;
        let nodes = nodes.into_iter().map(|(c, capable)| TargetNode { cell: Some(c), capable }).collect();
        let agents = agents.into_iter().map(|(class, s, g)| Agent { class, start: Some(s), goal: Some(g) }).collect();
        Self::from_matrices(classes, nodes, agents, matrices)
    }

    /// Builds an instance from explicit per-class matrices over the full
    /// vertex space (`N + 2A` rows).
    pub fn from_matrices(
        classes: Vec<AgentClass>,
        nodes: Vec<TargetNode>,
        agents: Vec<Agent>,
        matrices: Vec<CostMatrix<W>>,
    ) -> Result<Self, InstanceError> {
        if agents.is_empty() {
            return Err(InstanceError::NoAgents);
        }
        if agents.len() > MAX_AGENTS {
            return Err(InstanceError::TooManyAgents(agents.len()));
        }
        for (i, a) in agents.iter().enumerate() {
            if a.class >= classes.len() {
                return Err(InstanceError::UnknownClass { agent: i, class: a.class, classes: classes.len() });
            }
        }
        for (v, n) in nodes.iter().enumerate() {
            if n.capable.is_empty() {
                return Err(InstanceError::NoCapableAgent(v));
            }
            if let Some(agent) = n.capable.iter().find(|&i| i >= agents.len()) {
                return Err(InstanceError::UnknownAgent { node: v, agent, agents: agents.len() });
            }
        }
        let expected = nodes.len() + 2 * agents.len();
        if matrices.len() != classes.len() {
            return Err(InstanceError::MatrixSize { class: matrices.len(), expected: classes.len(), found: matrices.len() });
        }
        for (k, m) in matrices.iter().enumerate() {
            if m.size() != expected {
                return Err(InstanceError::MatrixSize { class: k, expected, found: m.size() });
            }
            if !m.is_symmetric() {
                return Err(InstanceError::Asymmetric(k));
            }
        }
        Ok(MhppInstance { map: None, seed: None, classes, nodes, agents, matrices })
    }

    pub fn with_provenance(mut self, map: Option<String>, seed: Option<u64>) -> Self {
        self.map = map;
        self.seed = seed;
        self
    }

    pub fn map(&self) -> Option<&str> {
        self.map.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn classes(&self) -> &[AgentClass] {
        &self.classes
    }

    pub fn nodes(&self) -> &[TargetNode] {
        &self.nodes
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn matrices(&self) -> &[CostMatrix<W>] {
        &self.matrices
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.nodes.len() + 2 * self.agents.len()
    }

    #[inline]
    pub fn start(&self, agent: AgentId) -> VertexId {
        self.nodes.len() + agent
    }

    #[inline]
    pub fn goal(&self, agent: AgentId) -> VertexId {
        self.nodes.len() + self.agents.len() + agent
    }

    #[inline]
    pub fn is_target(&self, v: VertexId) -> bool {
        v < self.nodes.len()
    }

    /// Whether `agent` may visit vertex `v`. Non-target vertices are open
    /// to everyone.
    #[inline]
    pub fn capable(&self, agent: AgentId, v: VertexId) -> bool {
        v >= self.nodes.len() || self.nodes[v].capable.contains(agent)
    }

    /// c^i(u, v): infinite when either endpoint is a target the agent may not
    /// visit.
    #[inline]
    pub fn cost(&self, agent: AgentId, u: VertexId, v: VertexId) -> W {
        if !self.capable(agent, u) || !self.capable(agent, v) {
            return W::infinity();
        }
        self.matrices[self.agents[agent].class].get(u, v)
    }

    /// Cost of a vertex sequence for one agent.
    pub fn path_cost(&self, agent: AgentId, path: &[VertexId]) -> W {
        path.windows(2).fold(W::zero(), |acc, e| acc.guarded_add(self.cost(agent, e[0], e[1])))
    }

    /// Set of agents that share `agent`'s capability footprint over targets.
    pub fn footprint(&self, agent: AgentId) -> Vec<bool> {
        self.nodes.iter().map(|n| n.capable.contains(agent)).collect()
    }

    /// Class names of the agents capable of `v`, one entry per class whose
    /// every agent is capable.
    pub fn capable_classes(&self, v: VertexId) -> Vec<String> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let mut members = self.agents.iter().enumerate().filter(|(_, a)| a.class == *k).peekable();
                members.peek().is_some() && members.all(|(i, _)| self.nodes[v].capable.contains(i))
            })
            .map(|(_, c)| c.name.clone())
            .collect()
    }
}
