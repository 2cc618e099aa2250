use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AgentSet, InstanceError, MhppInstance};
use crate::gridmap::{largest_component_mask, AgentClass, Cell, Passability, Terrain, TerrainGrid};
use crate::weight::Weight;

/// Where each agent's goal vertex sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalMode {
    /// Goal cell equals the start cell.
    #[default]
    ReturnToStart,
    /// Goal sampled independently from the same eligible cells as starts.
    Distinct,
}

/// Labels every open cell with its connected-component id (`usize::MAX` for
/// blocked cells). Returns the labels and the size of each component.
fn largest_component(grid: &TerrainGrid, class: &AgentClass) -> Vec<bool> {
    let mask = grid.passable_mask(class);
    largest_component_mask(&Passability::new(grid.width(), grid.height(), &mask))
}

/// Samples a random instance.
///
/// Two thirds of the nodes (rounded up) are "normal" nodes on Ground cells
/// that every class reaches; the rest sit on Swamp or Water cells. A node's
/// capable set is every agent whose class's largest region contains it.
/// All nodes lie in the largest connected region of the most capable class, so every pair is mutually
/// reachable for that class. Each agent starts on a Ground cell inside the
/// largest region of its own class that overlaps the node region.
///
/// `fleet` lists each class with how many agents of it to create, in order.
/// Deterministic for a fixed seed (ChaCha8).
pub fn generate_random_instance<W: Weight>(
    grid: &TerrainGrid,
    n_nodes: usize,
    fleet: &[(AgentClass, usize)],
    seed: u64,
    goals: GoalMode,
) -> Result<MhppInstance<W>, InstanceError> {
    let classes: Vec<AgentClass> = fleet.iter().map(|(c, _)| c.clone()).collect();
    let agent_classes: Vec<usize> = fleet.iter().enumerate().flat_map(|(k, (_, n))| std::iter::repeat_n(k, *n)).collect();
    if agent_classes.is_empty() {
        return Err(InstanceError::NoAgents);
    }
    if agent_classes.len() > super::MAX_AGENTS {
        return Err(InstanceError::TooManyAgents(agent_classes.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let widest = (0..classes.len()).max_by_key(|&k| (classes[k].passable.len(), std::cmp::Reverse(k))).unwrap_or(0);
    let region = largest_component(grid, &classes[widest]);

    let n_normal = (2 * n_nodes).div_ceil(3);
    let n_restricted = n_nodes - n_normal;

    let own_regions: Vec<Vec<bool>> = classes.iter().map(|k| largest_component(grid, k)).collect();
    let pick = |pred: &dyn Fn(usize) -> bool| -> Vec<Cell> {
        (0..grid.len()).filter(|&i| region[i] && pred(i)).map(|i| grid.cell_at(i)).collect()
    };
    let normal_pool = pick(&|i| grid.terrain_at(i) == Terrain::Ground && own_regions.iter().all(|r| r[i]));
    let restricted_pool = pick(&|i| matches!(grid.terrain_at(i), Terrain::Swamp | Terrain::Water));
    if normal_pool.len() < n_normal {
        return Err(InstanceError::Generation(format!(
            "need {n_normal} Ground cells reachable by every class, found {}",
            normal_pool.len()
        )));
    }
    if restricted_pool.len() < n_restricted {
        return Err(InstanceError::Generation(format!(
            "need {n_restricted} Swamp/Water cells in the reachable region, found {}",
            restricted_pool.len()
        )));
    }

    let capable_for = |c: Cell| -> AgentSet {
        let i = grid.index(c);
        agent_classes.iter().enumerate().filter(|(_, &k)| own_regions[k][i]).map(|(i, _)| i).collect()
    };

    let mut nodes = Vec::with_capacity(n_nodes);
    for &c in normal_pool.choose_multiple(&mut rng, n_normal) {
        nodes.push((c, capable_for(c)));
    }
    for &c in restricted_pool.choose_multiple(&mut rng, n_restricted) {
        let cap = capable_for(c);
        if cap.is_empty() {
            return Err(InstanceError::Generation(format!("no agent class can reach {c}")));
        }
        nodes.push((c, cap));
    }

    // Per-class start pools: Ground cells in the class's largest region that
    // also belong to the node region.
    let start_pools: Vec<Vec<Cell>> = own_regions
        .iter()
        .map(|own| {
            (0..grid.len())
                .filter(|&i| own[i] && region[i] && grid.terrain_at(i) == Terrain::Ground)
                .map(|i| grid.cell_at(i))
                .collect()
        })
        .collect();
    let mut agents = Vec::with_capacity(agent_classes.len());
    for &k in &agent_classes {
        let pool = &start_pools[k];
        let start = *pool.choose(&mut rng).ok_or_else(|| {
            InstanceError::Generation(format!("no Ground start cell reachable for class {}", classes[k].name))
        })?;
        let goal = match goals {
            GoalMode::ReturnToStart => start,
            GoalMode::Distinct => *pool.choose(&mut rng).expect("pool is nonempty"),
        };
        agents.push((k, start, goal));
    }

    Ok(MhppInstance::from_grid(grid, classes, nodes, agents)?.with_provenance(None, Some(seed)))
}
