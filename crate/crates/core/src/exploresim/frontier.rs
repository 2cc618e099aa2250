use std::collections::HashMap;

use crate::gridmap::{AgentClass, Cell};
use crate::instance::AgentSet;

use super::known::KnownGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frontier {
    pub cell: Cell,
    /// Robots able to stand on the cell.
    pub capable: AgentSet,
}

impl Frontier {
    /// Visitable by only part of a team of `n` robots.
    pub fn is_hetero(&self, n: usize) -> bool {
        self.capable != AgentSet::all(n)
    }
}

/// Known cells that some class in `classes` (or some robot) can occupy and
/// that touch unknown space, in row-major order. `robots[i]` is robot `i`'s
/// class. The capable set may be empty when only absent classes fit.
pub fn detect_frontiers(known: &KnownGrid, classes: &[AgentClass], robots: &[AgentClass]) -> Vec<Frontier> {
    let mut out = Vec::new();
    for idx in 0..known.len() {
        let Some(t) = known.get_at(idx) else { continue };
        let capable: AgentSet = robots.iter().enumerate().filter(|(_, k)| k.can_traverse(t)).map(|(i, _)| i).collect();
        let visitable = !capable.is_empty() || classes.iter().any(|k| k.can_traverse(t));
        if visitable && known.borders_unknown(idx) {
            out.push(Frontier { cell: known.cell_at(idx), capable });
        }
    }
    out
}

/// Square window of half-width `r` around a cell, clipped to the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Window {
    pub fn around(c: Cell, r: usize, width: usize, height: usize) -> Self {
        Window {
            x0: c.x.saturating_sub(r),
            y0: c.y.saturating_sub(r),
            x1: (c.x + r).min(width - 1),
            y1: (c.y + r).min(height - 1),
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        (self.x0..=self.x1).contains(&c.x) && (self.y0..=self.y1).contains(&c.y)
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Members in row-major order.
    pub members: Vec<Frontier>,
    pub representative: Cell,
    /// Robots able to reach the representative.
    pub capable: AgentSet,
    /// Share of members that are hetero-frontiers.
    pub hetero_fraction: f64,
}

impl Cluster {
    /// Share of members robot `i` can visit that not every robot can.
    pub fn hetero_fraction_for(&self, i: usize, n: usize) -> f64 {
        let h = self.members.iter().filter(|f| f.capable.contains(i) && f.is_hetero(n)).count();
        h as f64 / self.members.len() as f64
    }

    pub fn is_hetero(&self) -> bool {
        self.hetero_fraction > 0.0
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage clustering: frontiers within Euclidean distance `rho`
/// (in cells) share a cluster. The representative is the member with the
/// smallest summed distance to the others. Clusters are ordered by their
/// first member. `n` is the team size.
pub fn cluster_frontiers(frontiers: &[Frontier], rho: f64, n: usize) -> Vec<Cluster> {
    let at: HashMap<Cell, usize> = frontiers.iter().enumerate().map(|(i, f)| (f.cell, i)).collect();
    let mut parent: Vec<usize> = (0..frontiers.len()).collect();
    let reach = rho.max(0.0).floor() as isize;
    let rho2 = rho * rho;
    for (i, f) in frontiers.iter().enumerate() {
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if (dx * dx + dy * dy) as f64 > rho2 {
                    continue;
                }
                let (x, y) = (f.cell.x as isize + dx, f.cell.y as isize + dy);
                if x < 0 || y < 0 {
                    continue;
                }
                if let Some(&j) = at.get(&Cell::new(x as usize, y as usize)) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..frontiers.len() {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
        .into_iter()
        .map(|g| {
            let members: Vec<Frontier> = g.iter().map(|&i| frontiers[i]).collect();
            let rep = (0..members.len())
                .map(|a| {
                    let s: f64 = members.iter().map(|m| m.cell.dist(members[a].cell)).sum();
                    (s, a)
                })
                .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
                .map(|(_, a)| a)
                .expect("nonempty cluster");
            let hetero = members.iter().filter(|f| f.is_hetero(n)).count();
            Cluster {
                representative: members[rep].cell,
                capable: members[rep].capable,
                hetero_fraction: hetero as f64 / members.len() as f64,
                members,
            }
        })
        .collect()
}

/// Who owns a cluster and whether that decision was made locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ownership {
    pub owner: Option<usize>,
    /// The representative lies in the window of some capable robot.
    pub local: bool,
}

/// Assigns every cluster to one capable robot. Clusters inside the windows
/// of several capable robots go to the highest priority one when they hold
/// hetero-frontiers (and `use_priority` is set), otherwise to the nearest.
/// Clusters outside every capable window go to the nearest capable robot and
/// are left to global planning. Ties go to the lowest id.
pub fn priority_assign(robots: &[(Cell, i32)], windows: &[Window], clusters: &[Cluster], use_priority: bool) -> Vec<Ownership> {
    clusters
        .iter()
        .map(|k| {
            let rep = k.representative;
            let nearest = |cands: &mut dyn Iterator<Item = usize>| cands.min_by_key(|&i| (robots[i].0.dist2(rep), i));
            let inside: Vec<usize> = k.capable.iter().filter(|&i| windows[i].contains(rep)).collect();
            if inside.is_empty() {
                return Ownership { owner: nearest(&mut k.capable.iter()), local: false };
            }
            let owner = if inside.len() > 1 && use_priority && k.is_hetero() {
                inside.iter().copied().min_by_key(|&i| (std::cmp::Reverse(robots[i].1), i))
            } else {
                nearest(&mut inside.iter().copied())
            };
            Ownership { owner, local: true }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploresim::known::sense;
    use crate::gridmap::{Terrain, TerrainGrid};

    fn f(x: usize, y: usize, capable: &[usize]) -> Frontier {
        Frontier { cell: Cell::new(x, y), capable: capable.iter().copied().collect() }
    }

    #[test]
    fn fully_known_has_no_frontiers() {
        let truth = TerrainGrid::filled(4, 4, Terrain::Ground);
        let mut k = KnownGrid::new(4, 4);
        sense(&mut k, &truth, Cell::new(0, 0), 10);
        assert!(detect_frontiers(&k, &[], &[AgentClass::ground_vehicle()]).is_empty());
    }

    #[test]
    fn disk_yields_ring() {
        let truth = TerrainGrid::filled(15, 15, Terrain::Ground);
        let mut k = KnownGrid::new(15, 15);
        let at = Cell::new(7, 7);
        sense(&mut k, &truth, at, 3);
        let fr = detect_frontiers(&k, &[], &[AgentClass::ground_vehicle()]);
        assert!(!fr.is_empty());
        assert!(fr.iter().all(|q| q.cell.dist2(at) >= 4 && q.cell.dist2(at) <= 9));
        assert!(fr.windows(2).all(|w| (w[0].cell.y, w[0].cell.x) < (w[1].cell.y, w[1].cell.x)));
        let clusters = cluster_frontiers(&fr, 3.0, 1);
        assert_eq!(clusters.len(), 1);
    }

    #[test]
    fn water_frontiers_are_av_only() {
        let truth = TerrainGrid::from_rows(&["WWWWW", "WWWWW", "WWWWW"]).unwrap();
        let mut k = KnownGrid::new(5, 3);
        sense(&mut k, &truth, Cell::new(0, 1), 1);
        let fr = detect_frontiers(&k, &[], &[AgentClass::ground_vehicle(), AgentClass::aerial_vehicle()]);
        assert!(!fr.is_empty());
        assert!(fr.iter().all(|q| q.capable == AgentSet::single(1) && q.is_hetero(2)));
        // A GV-only team still sees them, with nobody capable.
        let gv_only = detect_frontiers(&k, &[AgentClass::aerial_vehicle()], &[AgentClass::ground_vehicle()]);
        assert_eq!(gv_only.len(), fr.len());
        assert!(gv_only.iter().all(|q| q.capable.is_empty()));
        assert!(detect_frontiers(&k, &[], &[AgentClass::ground_vehicle()]).is_empty());
    }

    #[test]
    fn clustering_basics() {
        let one = cluster_frontiers(&[f(0, 0, &[1])], 3.0, 2);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].hetero_fraction, 1.0);
        let one = cluster_frontiers(&[f(0, 0, &[0, 1])], 3.0, 2);
        assert_eq!(one[0].hetero_fraction, 0.0);

        let two = cluster_frontiers(&[f(0, 0, &[0]), f(10, 0, &[0])], 3.0, 1);
        assert_eq!(two.len(), 2);

        let mixed = cluster_frontiers(&[f(0, 0, &[1]), f(1, 0, &[0, 1]), f(2, 0, &[1]), f(3, 0, &[0, 1])], 1.5, 2);
        assert_eq!(mixed.len(), 1);
        assert_eq!(mixed[0].hetero_fraction, 0.5);
        // Medoid of 0..3 on a line: 1 and 2 tie, row-major first wins.
        assert_eq!(mixed[0].representative, Cell::new(1, 0));
        assert_eq!(mixed[0].hetero_fraction_for(0, 2), 0.0);
        assert_eq!(mixed[0].hetero_fraction_for(1, 2), 0.5);
    }

    #[test]
    fn single_linkage_chains() {
        let chain: Vec<Frontier> = (0..6).map(|i| f(i * 3, 0, &[0])).collect();
        assert_eq!(cluster_frontiers(&chain, 3.0, 1).len(), 1);
        assert_eq!(cluster_frontiers(&chain, 2.9, 1).len(), 6);
    }

    fn cluster_at(x: usize, y: usize, capable: &[usize], hetero: bool) -> Cluster {
        let fr = f(x, y, capable);
        Cluster { members: vec![fr], representative: fr.cell, capable: fr.capable, hetero_fraction: if hetero { 1.0 } else { 0.0 } }
    }

    #[test]
    fn priority_goes_to_aerial() {
        // GV (xi 1) at 5,5 is closer than AV (xi 2) at 9,5; both see the cluster.
        let robots = [(Cell::new(5, 5), 1), (Cell::new(9, 5), 2)];
        let windows = [Window::around(robots[0].0, 10, 30, 30), Window::around(robots[1].0, 10, 30, 30)];
        let k = cluster_at(4, 5, &[0, 1], true);
        assert_eq!(priority_assign(&robots, &windows, std::slice::from_ref(&k), true)[0], Ownership { owner: Some(1), local: true });
        // Without priority: nearest.
        assert_eq!(priority_assign(&robots, &windows, &[k], false)[0].owner, Some(0));
        // Non-hetero overlap: nearest.
        let k = cluster_at(4, 5, &[0, 1], false);
        assert_eq!(priority_assign(&robots, &windows, &[k], true)[0].owner, Some(0));
        // GV-only capability wins over priority.
        let k = cluster_at(8, 5, &[0], true);
        assert_eq!(priority_assign(&robots, &windows, &[k], true)[0].owner, Some(0));
    }

    #[test]
    fn disjoint_windows_use_nearest() {
        let robots = [(Cell::new(2, 2), 1), (Cell::new(40, 40), 2)];
        let windows = [Window::around(robots[0].0, 3, 50, 50), Window::around(robots[1].0, 3, 50, 50)];
        let near0 = cluster_at(3, 3, &[0, 1], true);
        let far = cluster_at(20, 30, &[0, 1], true);
        let own = priority_assign(&robots, &windows, &[near0, far], true);
        assert_eq!(own[0], Ownership { owner: Some(0), local: true });
        assert_eq!(own[1], Ownership { owner: Some(1), local: false });
    }

    #[test]
    fn window_clips() {
        let w = Window::around(Cell::new(1, 1), 3, 10, 4);
        assert_eq!((w.x0, w.y0, w.x1, w.y1), (0, 0, 4, 3));
        assert!(w.contains(Cell::new(4, 3)));
        assert!(!w.contains(Cell::new(5, 0)));
    }
}
