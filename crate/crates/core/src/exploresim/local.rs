use crate::gridmap::{astar_path, dijkstra, AgentClass, Cell, Passability};
use crate::weight::Weight;

use super::frontier::Window;
use super::known::KnownGrid;

/// Largest vertex count (start included) solved exactly.
pub const EXACT_TSP_LIMIT: usize = 10;

/// Open-path TSP from vertex 0 through every other vertex, no return.
/// Returns the cost and the visiting order of vertices `1..n`. Exact subset
/// DP up to [`EXACT_TSP_LIMIT`] vertices, nearest neighbour plus 2-opt
/// above. Infinite entries mark missing edges.
pub fn open_tsp(costs: &[Vec<u64>]) -> (u64, Vec<usize>) {
    let n = costs.len();
    if n <= 1 {
        return (0, Vec::new());
    }
    if n <= EXACT_TSP_LIMIT {
        exact_open_tsp(costs)
    } else {
        heuristic_open_tsp(costs)
    }
}

fn path_len(costs: &[Vec<u64>], order: &[usize]) -> u64 {
    let mut prev = 0;
    let mut total = 0u64;
    for &v in order {
        total = total.guarded_add(costs[prev][v]);
        prev = v;
    }
    total
}

fn exact_open_tsp(costs: &[Vec<u64>]) -> (u64, Vec<usize>) {
    let k = costs.len() - 1;
    let full = 1usize << k;
    let inf = u64::MAX;
    // dp[mask][j]: cheapest path from 0 over mask (bits over 1..=k) ending at j+1.
    let mut dp = vec![vec![(inf, usize::MAX); k]; full];
    for j in 0..k {
        dp[1 << j][j] = (costs[0][j + 1], usize::MAX);
    }
    for mask in 1..full {
        for j in 0..k {
            let (d, _) = dp[mask][j];
            if mask & (1 << j) == 0 || d == inf {
                continue;
            }
            for n in 0..k {
                if mask & (1 << n) == 0 {
                    let c = d.guarded_add(costs[j + 1][n + 1]);
                    let slot = &mut dp[mask | (1 << n)][n];
                    if c < slot.0 {
                        *slot = (c, j);
                    }
                }
            }
        }
    }
    let (best, mut j) = (0..k).map(|j| (dp[full - 1][j].0, j)).min().expect("k >= 1");
    let mut mask = full - 1;
    let mut order = Vec::with_capacity(k);
    while j != usize::MAX {
        order.push(j + 1);
        let p = dp[mask][j].1;
        mask &= !(1 << j);
        j = p;
    }
    order.reverse();
    (best, order)
}

fn heuristic_open_tsp(costs: &[Vec<u64>]) -> (u64, Vec<usize>) {
    let n = costs.len();
    let mut left: Vec<usize> = (1..n).collect();
    let mut order = Vec::with_capacity(n - 1);
    let mut at = 0;
    while !left.is_empty() {
        let k = (0..left.len()).min_by_key(|&k| (costs[at][left[k]], left[k])).expect("nonempty");
        at = left.remove(k);
        order.push(at);
    }
    // 2-opt on the open path; the last vertex is free, so reversing a suffix
    // is also allowed.
    loop {
        let cur = path_len(costs, &order);
        let mut best: Option<(u64, usize, usize)> = None;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                let mut cand = order.clone();
                cand[i..=j].reverse();
                let c = path_len(costs, &cand);
                if c < cur && best.is_none_or(|b| c < b.0) {
                    best = Some((c, i, j));
                }
            }
        }
        match best {
            Some((_, i, j)) => order[i..=j].reverse(),
            None => return (cur, order),
        }
    }
}

/// A representative offered to local planning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTarget {
    pub cell: Cell,
    /// Hetero share of its cluster from this robot's view.
    pub hetero: f64,
}

/// Chosen first leg of the local tour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalChoice {
    pub target: Cell,
    /// Cells from the robot (exclusive) to the target (inclusive).
    pub path: Vec<Cell>,
}

/// Plans over the robot's window: costs are shortest paths through known,
/// class-traversable cells inside the window. Edges leaving the robot drop
/// by `alpha * hetero * c0` (floored at zero). Returns the first target of
/// the open tour, or `None` if no target is reachable.
pub fn local_plan(
    at: Cell,
    class: &AgentClass,
    window: Window,
    known: &KnownGrid,
    targets: &[LocalTarget],
    alpha: f64,
    c0: u64,
) -> Option<LocalChoice> {
    let (w, h) = (window.width(), window.height());
    let mut open = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let c = Cell::new(window.x0 + x, window.y0 + y);
            open[y * w + x] = known.get(c).is_some_and(|t| class.can_traverse(t));
        }
    }
    let pass = Passability::new(w, h, &open);
    let local = |c: Cell| (c.y - window.y0) * w + (c.x - window.x0);
    if !window.contains(at) || !pass.open(local(at)) {
        return None;
    }

    let from_robot = dijkstra(&pass, local(at), None);
    let reachable: Vec<&LocalTarget> =
        targets.iter().filter(|t| window.contains(t.cell) && from_robot[local(t.cell)] != u64::MAX).collect();
    if reachable.is_empty() {
        return None;
    }
    let n = reachable.len() + 1;
    let mut costs = vec![vec![0u64; n]; n];
    for (a, t) in reachable.iter().enumerate() {
        let raw = from_robot[local(t.cell)];
        let bonus = (alpha * t.hetero * c0 as f64).max(0.0);
        let adj = (raw as f64 - bonus).max(0.0).round() as u64;
        costs[0][a + 1] = adj;
        costs[a + 1][0] = adj;
        let d = dijkstra(&pass, local(t.cell), None);
        for (b, u) in reachable.iter().enumerate() {
            costs[a + 1][b + 1] = d[local(u.cell)];
        }
    }
    let (_, order) = open_tsp(&costs);
    let first = reachable[order[0] - 1].cell;
    let (_, cells) = astar_path(&pass, local(at), local(first))?;
    let path = cells.into_iter().skip(1).map(|c| Cell::new(c.x + window.x0, c.y + window.y0)).collect();
    Some(LocalChoice { target: first, path })
}
