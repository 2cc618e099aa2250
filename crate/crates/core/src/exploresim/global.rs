use crate::baselines::greedy_b1;
use crate::gridmap::{matrix_over, AgentClass, Cell, CostMatrix, Passability};
use crate::instance::{Agent, AgentSet, MhppInstance, TargetNode};
use crate::peaf::{solve, PeafParams};
use crate::Cost;

use super::frontier::Cluster;
use super::known::KnownGrid;

/// Result of one global allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalPlan {
    pub tick: u64,
    /// Next global waypoint per robot.
    pub targets: Vec<Option<Cell>>,
    /// Representatives no capable robot can reach even optimistically.
    pub deferred: Vec<Cell>,
}

/// Allocates cluster representatives to robots by solving an mHPP with
/// open goals: each robot starts at its cell and may stop anywhere (goal
/// vertices are free to reach). Costs are per-class shortest paths where
/// unknown cells count as traversable. The search runs under a fixed
/// expansion budget; greedy construction covers the case where no
/// incumbent appears in time.
pub fn global_plan(tick: u64, known: &KnownGrid, robots: &[(Cell, AgentClass)], clusters: &[&Cluster], expansions: u64) -> GlobalPlan {
    let na = robots.len();
    let mut plan = GlobalPlan { tick, targets: vec![None; na], deferred: Vec::new() };
    if clusters.is_empty() || na == 0 {
        return plan;
    }

    let mut classes: Vec<AgentClass> = Vec::new();
    let class_of: Vec<usize> = robots
        .iter()
        .map(|(_, k)| match classes.iter().position(|c| c == k) {
            Some(i) => i,
            None => {
                classes.push(k.clone());
                classes.len() - 1
            }
        })
        .collect();

    let mut idx: Vec<usize> = clusters.iter().map(|k| known.index(k.representative)).collect();
    idx.extend(robots.iter().map(|(c, _)| known.index(*c)));
    let c = clusters.len();
    let raw: Vec<CostMatrix<Cost>> = classes
        .iter()
        .map(|k| {
            let mask = known.optimistic_mask(k);
            matrix_over(&Passability::new(known.width(), known.height(), &mask), &idx)
        })
        .collect();

    let mut keep = Vec::new();
    let mut caps = Vec::new();
    for (k, cl) in clusters.iter().enumerate() {
        let capable: AgentSet = cl.capable.iter().filter(|&i| i < na && raw[class_of[i]].get(k, c + i) != Cost::MAX).collect();
        if capable.is_empty() {
            plan.deferred.push(cl.representative);
        } else {
            keep.push(k);
            caps.push(capable);
        }
    }
    if keep.is_empty() {
        return plan;
    }

    let n = keep.len();
    // Vertex ids: kept clusters, then robot starts, then the free goals.
    let src: Vec<usize> = keep.iter().copied().chain((0..na).map(|i| c + i)).collect();
    let matrices: Vec<CostMatrix<Cost>> = raw
        .iter()
        .map(|m| {
            let mut full = CostMatrix::new(n + 2 * na);
            for (a, &sa) in src.iter().enumerate() {
                for (b, &sb) in src.iter().enumerate() {
                    full.set(a, b, m.get(sa, sb));
                }
            }
            for g in n + na..n + 2 * na {
                for v in 0..n + 2 * na {
                    full.set_symmetric(g, v, 0);
                }
            }
            full
        })
        .collect();
    let nodes = caps.into_iter().map(|capable| TargetNode { cell: None, capable }).collect();
    let agents = class_of.iter().map(|&class| Agent { class, start: None, goal: None }).collect();
    let inst = match MhppInstance::from_matrices(classes, nodes, agents, matrices) {
        Ok(inst) => inst,
        Err(e) => {
            log::warn!("global plan skipped: {e}");
            return plan;
        }
    };

    let params = PeafParams { max_expansions: Some(expansions), time_limit: None, ..PeafParams::default() };
    let sol = match solve(&inst, &params).best {
        Some(s) => Some(s),
        None => greedy_b1(&inst).ok(),
    };
    if let Some(sol) = sol {
        for (i, p) in sol.paths.iter().enumerate() {
            if p.len() > 1 && p[1] < n {
                plan.targets[i] = Some(clusters[keep[p[1]]].representative);
            }
        }
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploresim::frontier::Frontier;
    use crate::gridmap::Terrain;

    fn cluster(c: Cell, capable: AgentSet) -> Cluster {
        Cluster { members: vec![Frontier { cell: c, capable }], representative: c, capable, hetero_fraction: 0.0 }
    }

    fn all_known(w: usize, h: usize, t: Terrain) -> KnownGrid {
        let mut k = KnownGrid::new(w, h);
        for y in 0..h {
            for x in 0..w {
                k.reveal(Cell::new(x, y), t);
            }
        }
        k
    }

    #[test]
    fn single_cluster_single_robot() {
        let k = all_known(10, 10, Terrain::Ground);
        let cl = cluster(Cell::new(7, 7), AgentSet::single(0));
        let p = global_plan(3, &k, &[(Cell::new(0, 0), AgentClass::ground_vehicle())], &[&cl], 100);
        assert_eq!(p.targets, vec![Some(Cell::new(7, 7))]);
        assert!(p.deferred.is_empty());
        assert_eq!(p.tick, 3);
    }

    #[test]
    fn unreachable_clusters_are_deferred() {
        let mut k = KnownGrid::new(6, 1);
        for x in 0..6 {
            k.reveal(Cell::new(x, 0), if x == 3 { Terrain::Water } else { Terrain::Ground });
        }
        let cl = cluster(Cell::new(5, 0), AgentSet::single(0));
        let p = global_plan(0, &k, &[(Cell::new(0, 0), AgentClass::ground_vehicle())], &[&cl], 100);
        assert_eq!(p.targets, vec![None]);
        assert_eq!(p.deferred, vec![Cell::new(5, 0)]);
    }

    #[test]
    fn unknown_space_is_optimistic() {
        let mut k = KnownGrid::new(8, 1);
        k.reveal(Cell::new(0, 0), Terrain::Ground);
        k.reveal(Cell::new(7, 0), Terrain::Ground);
        let cl = cluster(Cell::new(7, 0), AgentSet::single(0));
        let p = global_plan(0, &k, &[(Cell::new(0, 0), AgentClass::ground_vehicle())], &[&cl], 100);
        assert_eq!(p.targets, vec![Some(Cell::new(7, 0))]);
    }

    #[test]
    fn two_robots_split_far_clusters() {
        let k = all_known(30, 3, Terrain::Ground);
        let both = AgentSet::all(2);
        let cls = [cluster(Cell::new(0, 1), both), cluster(Cell::new(29, 1), both)];
        let refs: Vec<&Cluster> = cls.iter().collect();
        let robots = [(Cell::new(2, 1), AgentClass::ground_vehicle()), (Cell::new(27, 1), AgentClass::aerial_vehicle())];
        let p = global_plan(0, &k, &robots, &refs, 1000);
        assert_eq!(p.targets, vec![Some(Cell::new(0, 1)), Some(Cell::new(29, 1))]);
    }
}
