//! Discrete-time frontier exploration with a heterogeneous team.
//!
//! Each tick every robot senses, the team's frontiers are detected and
//! clustered, clusters are handed to robots, and each robot advances one
//! 8-connected step. Clusters near a robot are planned locally with a small
//! open-path TSP whose first legs are discounted toward hetero-frontiers;
//! the rest are allocated globally by solving an mHPP over all robots.
//!
//! A robot keeps its target until it reaches it or the target stops being a
//! frontier, so every target reached reveals something and episodes end.

mod frontier;
mod global;
mod known;
mod local;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{
    astar_path, dijkstra, largest_component_mask, parse_map, AgentClass, Cell, MapError, Passability, TerrainGrid, DIAGONAL_COST,
    STRAIGHT_COST,
};
use crate::instance::{AgentSet, MAX_AGENTS};

pub use frontier::{cluster_frontiers, detect_frontiers, priority_assign, Cluster, Frontier, Ownership, Window};
pub use global::{global_plan, GlobalPlan};
pub use known::{bresenham, line_of_sight, sense, KnownGrid};
pub use local::{local_plan, open_tsp, LocalChoice, LocalTarget, EXACT_TSP_LIMIT};

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("robot {robot}: unknown class {class:?}")]
    UnknownClass { robot: usize, class: String },
    #[error("robot {robot}: start {cell} is outside the map or not traversable for its class")]
    BadStart { robot: usize, cell: Cell },
    #[error("no cell is traversable for every robot; give explicit starts")]
    NoStart,
    #[error("scenario has no robots")]
    NoRobots,
    #[error("{0} robots exceed the limit of {MAX_AGENTS}")]
    TooManyRobots(usize),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which local-planning rules are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ablation {
    /// Priority assignment and hetero-frontier cost.
    Full,
    /// No priority assignment.
    Nopr,
    /// No hetero-frontier cost.
    Nohe,
    /// Neither.
    Nolo,
}

impl Ablation {
    pub const ALL: [Ablation; 4] = [Ablation::Full, Ablation::Nopr, Ablation::Nohe, Ablation::Nolo];

    pub fn apply(self, p: &mut ExploreParams) {
        p.priority = matches!(self, Ablation::Full | Ablation::Nohe);
        p.hetero_cost = matches!(self, Ablation::Full | Ablation::Nopr);
    }

    pub fn name(self) -> &'static str {
        match self {
            Ablation::Full => "full",
            Ablation::Nopr => "nopr",
            Ablation::Nohe => "nohe",
            Ablation::Nolo => "nolo",
        }
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ablation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ablation::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown ablation {s:?} (full, nopr, nohe, nolo)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExploreParams {
    /// Gain on the hetero-frontier discount.
    pub alpha: f64,
    /// Discount scale; defaults to twice the sensing radius in cost units.
    pub c0: Option<u64>,
    /// Frontier clustering distance, in cells.
    pub rho: f64,
    /// Half-width of the local window, in cells.
    pub window: usize,
    /// Sensing radius, in cells.
    pub sense_radius: usize,
    /// Ticks between global replans.
    pub global_period: u64,
    /// Label expansions per global solve.
    pub global_expansions: u64,
    pub tick_cap: u64,
    /// Seeds start placement for robots without an explicit start.
    pub seed: u64,
    pub priority: bool,
    pub hetero_cost: bool,
}

impl Default for ExploreParams {
    fn default() -> Self {
        ExploreParams {
            alpha: 0.6,
            c0: None,
            rho: 3.0,
            window: 10,
            sense_radius: 7,
            global_period: 20,
            global_expansions: 200,
            tick_cap: 5000,
            seed: 0,
            priority: true,
            hetero_cost: true,
        }
    }
}

impl ExploreParams {
    pub fn bonus_scale(&self) -> u64 {
        self.c0.unwrap_or(2 * self.sense_radius as u64 * STRAIGHT_COST)
    }

    /// Discount gain actually applied.
    pub fn effective_alpha(&self) -> f64 {
        if self.hetero_cost {
            self.alpha
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    /// Class name, looked up in the scenario's classes.
    pub class: String,
    #[serde(default)]
    pub start: Option<Cell>,
    /// Overrides the class priority.
    #[serde(default)]
    pub priority: Option<i32>,
}

fn default_classes() -> Vec<AgentClass> {
    vec![AgentClass::ground_vehicle(), AgentClass::aerial_vehicle()]
}

/// An exploration scenario as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Map path, relative to the scenario file.
    pub map: String,
    #[serde(default = "default_classes")]
    pub classes: Vec<AgentClass>,
    pub robots: Vec<RobotConfig>,
    #[serde(default)]
    pub params: ExploreParams,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ExploreError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios always serialize") + "\n"
    }

    pub fn read(path: &Path) -> Result<Self, ExploreError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExploreError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Map location for a scenario read from `scenario_path`.
    pub fn map_path(&self, scenario_path: &Path) -> PathBuf {
        scenario_path.parent().unwrap_or(Path::new("")).join(&self.map)
    }

    pub fn load_map(&self, scenario_path: &Path) -> Result<TerrainGrid, ExploreError> {
        let path = self.map_path(scenario_path);
        let text = std::fs::read_to_string(&path).map_err(|source| ExploreError::Io { path: path.display().to_string(), source })?;
        Ok(parse_map(&text)?)
    }

    pub fn run(&self, grid: &TerrainGrid) -> Result<Episode, ExploreError> {
        run_episode(grid, &self.classes, &self.robots, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    /// Ticks until no reachable frontier remained (or the cap).
    pub ticks: u64,
    /// False when the tick cap cut the episode short.
    pub complete: bool,
    pub starts: Vec<Cell>,
    /// Distance per robot, 1000 per cell.
    pub robot_lengths: Vec<u64>,
    pub total_length: u64,
    pub known_cells: usize,
    pub total_cells: usize,
    /// Known fraction after every tick, starting with tick 0.
    pub coverage: Vec<f64>,
    /// Frontiers left that no capable robot can reach.
    pub unreachable_frontiers: Vec<Cell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub tick: u64,
    pub robot: usize,
    pub x: usize,
    pub y: usize,
    pub known_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub metrics: EpisodeMetrics,
    pub trace: Vec<TraceRow>,
    pub known: KnownGrid,
}

impl Episode {
    /// Cells visited by one robot, in order.
    pub fn robot_cells(&self, robot: usize) -> Vec<Cell> {
        self.trace.iter().filter(|r| r.robot == robot).map(|r| Cell::new(r.x, r.y)).collect()
    }
}

#[derive(Debug, Clone)]
struct Robot {
    class: AgentClass,
    cell: Cell,
    priority: i32,
    distance: u64,
    target: Option<Cell>,
    path: VecDeque<Cell>,
}

/// Uniform cell traversable for every class, inside the largest such region.
fn sample_start(grid: &TerrainGrid, classes: &[&AgentClass], seed: u64) -> Result<Cell, ExploreError> {
    let mask: Vec<bool> = grid.cells().iter().map(|&t| classes.iter().all(|k| k.can_traverse(t))).collect();
    let region = largest_component_mask(&Passability::new(grid.width(), grid.height(), &mask));
    let cells: Vec<usize> = (0..grid.len()).filter(|&i| region[i]).collect();
    if cells.is_empty() {
        return Err(ExploreError::NoStart);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(grid.cell_at(cells[rng.gen_range(0..cells.len())]))
}

fn step_cost(a: Cell, b: Cell) -> u64 {
    if a.x != b.x && a.y != b.y {
        DIAGONAL_COST
    } else {
        STRAIGHT_COST
    }
}

/// Runs one episode. Robots without a start share one sampled from
/// `params.seed`; the run is otherwise fully deterministic.
pub fn run_episode(grid: &TerrainGrid, classes: &[AgentClass], robots: &[RobotConfig], params: &ExploreParams) -> Result<Episode, ExploreError> {
    let n = robots.len();
    if n == 0 {
        return Err(ExploreError::NoRobots);
    }
    if n > MAX_AGENTS {
        return Err(ExploreError::TooManyRobots(n));
    }
    let (w, h) = (grid.width(), grid.height());
    let mut team = Vec::with_capacity(n);
    for (i, r) in robots.iter().enumerate() {
        let class = classes.iter().find(|k| k.name == r.class).ok_or_else(|| ExploreError::UnknownClass { robot: i, class: r.class.clone() })?;
        team.push(class);
    }
    let shared = if robots.iter().any(|r| r.start.is_none()) { Some(sample_start(grid, &team, params.seed)?) } else { None };
    let mut st: Vec<Robot> = Vec::with_capacity(n);
    for (i, r) in robots.iter().enumerate() {
        let cell = r.start.or(shared).expect("start present or sampled");
        if !grid.in_bounds(cell) || !team[i].can_traverse(grid.terrain_at(grid.index(cell))) {
            return Err(ExploreError::BadStart { robot: i, cell });
        }
        st.push(Robot {
            class: team[i].clone(),
            cell,
            priority: r.priority.unwrap_or(team[i].priority),
            distance: 0,
            target: None,
            path: VecDeque::new(),
        });
    }
    let class_list: Vec<AgentClass> = st.iter().map(|r| r.class.clone()).collect();
    let alpha = params.effective_alpha();
    let c0 = params.bonus_scale();

    let mut known = KnownGrid::new(w, h);
    let mut trace = Vec::new();
    let mut coverage = Vec::new();
    let record = |tick: u64, st: &[Robot], known: &KnownGrid, trace: &mut Vec<TraceRow>, coverage: &mut Vec<f64>| {
        for (i, r) in st.iter().enumerate() {
            trace.push(TraceRow { tick, robot: i, x: r.cell.x, y: r.cell.y, known_cells: known.known_count() });
        }
        coverage.push(known.known_count() as f64 / known.len() as f64);
    };
    for r in &st {
        sense(&mut known, grid, r.cell, params.sense_radius);
    }
    record(0, &st, &known, &mut trace, &mut coverage);

    let mut plan: Option<GlobalPlan> = None;
    let mut tick = 0u64;
    let (complete, unreachable) = loop {
        let masks: Vec<Vec<bool>> = class_list.iter().map(|k| known.known_mask(k)).collect();
        let dists: Vec<Vec<u64>> =
            (0..n).map(|i| dijkstra(&Passability::new(w, h, &masks[i]), known.index(st[i].cell), None)).collect();
        let all = detect_frontiers(&known, classes, &class_list);
        let mut frontiers = Vec::new();
        let mut stranded = Vec::new();
        for f in &all {
            let at = known.index(f.cell);
            let capable: AgentSet = f.capable.iter().filter(|&i| dists[i][at] != u64::MAX).collect();
            if capable.is_empty() {
                stranded.push(f.cell);
            } else {
                frontiers.push(Frontier { cell: f.cell, capable });
            }
        }
        if frontiers.is_empty() {
            break (true, stranded);
        }
        if tick >= params.tick_cap {
            break (false, stranded);
        }
        let open: HashMap<Cell, AgentSet> = frontiers.iter().map(|f| (f.cell, f.capable)).collect();
        let valid_for = |i: usize, c: Cell| open.get(&c).is_some_and(|s| s.contains(i));

        let clusters = cluster_frontiers(&frontiers, params.rho, n);
        let windows: Vec<Window> = st.iter().map(|r| Window::around(r.cell, params.window, w, h)).collect();
        let places: Vec<(Cell, i32)> = st.iter().map(|r| (r.cell, r.priority)).collect();
        let owners = priority_assign(&places, &windows, &clusters, params.priority);

        for i in 0..n {
            if st[i].target.is_some_and(|t| valid_for(i, t)) && !st[i].path.is_empty() {
                continue;
            }
            st[i].target = None;
            st[i].path.clear();

            let mine: Vec<LocalTarget> = clusters
                .iter()
                .zip(&owners)
                .filter(|(_, o)| o.local && o.owner == Some(i))
                .map(|(k, _)| LocalTarget { cell: k.representative, hetero: k.hetero_fraction_for(i, n) })
                .collect();
            if !mine.is_empty() {
                if let Some(choice) = local_plan(st[i].cell, &st[i].class, windows[i], &known, &mine, alpha, c0) {
                    st[i].target = Some(choice.target);
                    st[i].path = choice.path.into();
                    continue;
                }
            }

            let stale = plan.as_ref().is_none_or(|p| tick >= p.tick + params.global_period || !p.targets[i].is_some_and(|t| valid_for(i, t)));
            if stale && plan.as_ref().is_none_or(|p| p.tick != tick) {
                let remote: Vec<&Cluster> = clusters.iter().zip(&owners).filter(|(_, o)| !o.local).map(|(k, _)| k).collect();
                let roster: Vec<(Cell, AgentClass)> = st.iter().map(|r| (r.cell, r.class.clone())).collect();
                let p = global_plan(tick, &known, &roster, &remote, params.global_expansions);
                log::debug!("tick {tick}: global plan {:?}, {} deferred", p.targets, p.deferred.len());
                plan = Some(p);
            }
            let pass = Passability::new(w, h, &masks[i]);
            let here = known.index(st[i].cell);
            let global = plan.as_ref().and_then(|p| p.targets[i]).filter(|&t| valid_for(i, t));
            let goal = global.or_else(|| {
                frontiers
                    .iter()
                    .filter(|f| f.capable.contains(i))
                    .min_by_key(|f| (dists[i][known.index(f.cell)], f.cell.y, f.cell.x))
                    .map(|f| f.cell)
            });
            if let Some(t) = goal {
                if let Some((_, cells)) = astar_path(&pass, here, known.index(t)) {
                    st[i].target = Some(t);
                    st[i].path = cells.into_iter().skip(1).collect();
                }
            }
        }

        for r in st.iter_mut() {
            if let Some(next) = r.path.pop_front() {
                r.distance += step_cost(r.cell, next);
                r.cell = next;
            }
        }
        tick += 1;
        for r in &st {
            sense(&mut known, grid, r.cell, params.sense_radius);
        }
        record(tick, &st, &known, &mut trace, &mut coverage);
    };

    let robot_lengths: Vec<u64> = st.iter().map(|r| r.distance).collect();
    let metrics = EpisodeMetrics {
        ticks: tick,
        complete,
        starts: robots.iter().enumerate().map(|(i, r)| r.start.or(shared).unwrap_or(st[i].cell)).collect(),
        total_length: robot_lengths.iter().sum(),
        robot_lengths,
        known_cells: known.known_count(),
        total_cells: known.len(),
        coverage,
        unreachable_frontiers: unreachable,
    };
    Ok(Episode { metrics, trace, known })
}
