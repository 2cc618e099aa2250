use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::Cell;

pub const STRAIGHT_COST: u64 = 1000;
pub const DIAGONAL_COST: u64 = 1414;

const MOVES: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Row-major open/blocked mask over a `width` x `height` grid.
#[derive(Debug, Clone, Copy)]
pub struct Passability<'a> {
    width: usize,
    height: usize,
    open: &'a [bool],
}

impl<'a> Passability<'a> {
    pub fn new(width: usize, height: usize, open: &'a [bool]) -> Self {
        assert_eq!(open.len(), width * height, "mask size mismatch");
        Passability { width, height, open }
    }

    #[inline]
    pub fn open(&self, idx: usize) -> bool {
        self.open[idx]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Legal single-step moves from `idx` with their costs. A diagonal step
    /// needs both orthogonal corner cells open.
    #[inline]
    pub fn for_each_step(&self, idx: usize, mut f: impl FnMut(usize, u64)) {
        let x = (idx % self.width) as isize;
        let y = (idx / self.width) as isize;
        let (w, h) = (self.width as isize, self.height as isize);
        for (dx, dy) in MOVES {
            let nx = x + dx;
            let ny = y + dy;
            if nx < 0 || ny < 0 || nx >= w || ny >= h {
                continue;
            }
            let n = (ny * w + nx) as usize;
            if !self.open[n] {
                continue;
            }
            if dx != 0 && dy != 0 {
                let c1 = (y * w + nx) as usize;
                let c2 = (ny * w + x) as usize;
                if !self.open[c1] || !self.open[c2] {
                    continue;
                }
                f(n, DIAGONAL_COST);
            } else {
                f(n, STRAIGHT_COST);
            }
        }
    }

    fn octile(&self, a: usize, b: usize) -> u64 {
        let dx = (a % self.width).abs_diff(b % self.width) as u64;
        let dy = (a / self.width).abs_diff(b / self.width) as u64;
        let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
        STRAIGHT_COST * (hi - lo) + DIAGONAL_COST * lo
    }

    fn cell(&self, idx: usize) -> Cell {
        Cell::new(idx % self.width, idx / self.width)
    }
}

/// Labels 8-connected open regions. Returns per-index labels (`usize::MAX`
/// for blocked cells) and region sizes.
pub fn components(pass: &Passability<'_>) -> (Vec<usize>, Vec<usize>) {
    let n = pass.open.len();
    let mut label = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if !pass.open(s) || label[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        label[s] = id;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            size += 1;
            pass.for_each_step(u, |v, _| {
                if label[v] == usize::MAX {
                    label[v] = id;
                    queue.push_back(v);
                }
            });
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Mask of the largest open region (ties: the one containing the lowest
/// index).
pub fn largest_component_mask(pass: &Passability<'_>) -> Vec<bool> {
    let (label, sizes) = components(pass);
    let Some(best) = (0..sizes.len()).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))) else {
        return vec![false; label.len()];
    };
    label.iter().map(|&l| l == best).collect()
}

/// Single-source Dijkstra. Returns distances for every grid index
/// (`u64::MAX` = unreached). With `targets`, stops once all are settled.
pub fn dijkstra(pass: &Passability<'_>, source: usize, targets: Option<&[usize]>) -> Vec<u64> {
    let n = pass.open.len();
    let mut dist = vec![u64::MAX; n];
    if !pass.open(source) {
        return dist;
    }
    let mut pending = targets.map(|t| {
        let mut want = vec![false; n];
        let mut count = 0usize;
        for &i in t {
            if !want[i] && pass.open(i) {
                want[i] = true;
                count += 1;
            }
        }
        (want, count)
    });
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if let Some((want, count)) = pending.as_mut() {
            if want[u] {
                *count -= 1;
                if *count == 0 {
                    break;
                }
            }
        }
        pass.for_each_step(u, |v, w| {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        });
    }
    dist
}

/// A* with the octile heuristic. Returns the cost and the cell sequence
/// from `from` to `to` inclusive.
pub fn astar_path(pass: &Passability<'_>, from: usize, to: usize) -> Option<(u64, Vec<Cell>)> {
    if !pass.open(from) || !pass.open(to) {
        return None;
    }
    if from == to {
        return Some((0, vec![pass.cell(from)]));
    }
    let n = pass.open.len();
    let mut g = vec![u64::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    g[from] = 0;
    // (f, g-tiebreak, idx); larger g first among equal f keeps the search deep.
    heap.push(Reverse((pass.octile(from, to), Reverse(0u64), from)));
    while let Some(Reverse((_, _, u))) = heap.pop() {
        if closed[u] {
            continue;
        }
        if u == to {
            let mut path = vec![pass.cell(u)];
            let mut c = u;
            while parent[c] != usize::MAX {
                c = parent[c];
                path.push(pass.cell(c));
            }
            path.reverse();
            return Some((g[to], path));
        }
        closed[u] = true;
        let gu = g[u];
        pass.for_each_step(u, |v, w| {
            let ng = gu + w;
            if ng < g[v] {
                g[v] = ng;
                parent[v] = u;
                heap.push(Reverse((ng + pass.octile(v, to), Reverse(ng), v)));
            }
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fixpoint relaxation over all cells; no heap, no heuristic.
    fn relax_oracle(pass: &Passability<'_>, source: usize) -> Vec<u64> {
        let n = pass.open.len();
        let mut d = vec![u64::MAX; n];
        if !pass.open(source) {
            return d;
        }
        d[source] = 0;
        loop {
            let mut changed = false;
            for u in 0..n {
                if d[u] == u64::MAX {
                    continue;
                }
                let du = d[u];
                pass.for_each_step(u, |v, w| {
                    if du + w < d[v] {
                        d[v] = du + w;
                        changed = true;
                    }
                });
            }
            if !changed {
                return d;
            }
        }
    }

    fn random_mask(w: usize, h: usize, seed: u64) -> Vec<bool> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..w * h)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                !(s >> 33).is_multiple_of(4)
            })
            .collect()
    }

    #[test]
    fn three_by_three_corner_to_corner() {
        let open = vec![true; 9];
        let p = Passability::new(3, 3, &open);
        assert_eq!(relax_oracle(&p, 0)[8], 2828);
        assert_eq!(dijkstra(&p, 0, None)[8], 2828);
        assert_eq!(astar_path(&p, 0, 8).unwrap().0, 2828);
    }

    #[test]
    fn dijkstra_and_astar_match_relaxation() {
        for seed in 0..20 {
            let (w, h) = (9, 7);
            let open = random_mask(w, h, seed);
            let p = Passability::new(w, h, &open);
            let src = (0..w * h).find(|&i| open[i]).unwrap();
            let oracle = relax_oracle(&p, src);
            assert_eq!(dijkstra(&p, src, None), oracle);
            for (t, &want) in oracle.iter().enumerate() {
                let a = astar_path(&p, src, t).map(|x| x.0).unwrap_or(u64::MAX);
                assert_eq!(a, want, "seed {seed} target {t}");
            }
        }
    }

    #[test]
    fn astar_path_is_connected_and_costed() {
        let open = random_mask(12, 12, 99);
        let p = Passability::new(12, 12, &open);
        let cells: Vec<usize> = (0..144).filter(|&i| open[i]).collect();
        let (s, t) = (cells[0], *cells.last().unwrap());
        if let Some((cost, path)) = astar_path(&p, s, t) {
            let mut total = 0;
            for pair in path.windows(2) {
                let a = pair[0].y * 12 + pair[0].x;
                let b = pair[1].y * 12 + pair[1].x;
                let mut step = None;
                p.for_each_step(a, |v, w| {
                    if v == b {
                        step = Some(w);
                    }
                });
                total += step.expect("consecutive cells must be a legal step");
            }
            assert_eq!(total, cost);
        }
    }
}
