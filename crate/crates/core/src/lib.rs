//! Planning for heterogeneous robot teams.
//!
//! * [`gridmap`]: MovingAI terrain maps and per-class octile path costs.
//! * [`instance`]: min-max multiple Hamiltonian path instances and solutions.
//! * [`peaf`]: anytime focal search with partial expansion and label dominance.
//! * [`postopt`]: 2-opt and node-transfer improvement of complete solutions.
//! * [`baselines`]: greedy solvers and an exact oracle for small instances.
//! * [`exploresim`]: discrete-time frontier exploration on a grid.
//!
//! Everything that carries a cost is generic over [`Weight`]; the aliases
//! below fix it to `u64`.

pub mod baselines;
pub mod exploresim;
pub mod gridmap;
pub mod instance;
pub mod peaf;
pub mod postopt;
pub mod weight;

pub use weight::Weight;

/// Default cost scalar.
pub type Cost = u64;
pub type Instance = instance::MhppInstance<Cost>;
pub type Solution = instance::Solution<Cost>;
pub type CostMatrix = gridmap::CostMatrix<Cost>;
pub type SolverReport = peaf::SolverReport<Cost>;
