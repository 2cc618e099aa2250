//! Heterogeneous-terrain grid maps in the MovingAI `.map` format, per-class
//! traversability, and octile shortest-path costs between cells.

mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::weight::Weight;

pub use search::{astar_path, components, dijkstra, largest_component_mask, Passability, DIAGONAL_COST, STRAIGHT_COST};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("malformed map header at line {line}: {reason}")]
    Header { line: usize, reason: String },
    #[error("row {row} has {found} cells, expected {expected}")]
    Dimension { row: usize, expected: usize, found: usize },
    #[error("unknown terrain character {ch:?} at row {row}, column {col}")]
    Content { row: usize, col: usize, ch: char },
    #[error("cell ({x}, {y}) outside {width}x{height} grid")]
    OutOfBounds { x: usize, y: usize, width: usize, height: usize },
    #[error("agent class {0:?} lists Obstacle as passable")]
    ObstaclePassable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Terrain {
    Ground,
    Tree,
    Swamp,
    Water,
    Obstacle,
}

impl Terrain {
    pub const ALL: [Terrain; 5] = [Terrain::Ground, Terrain::Tree, Terrain::Swamp, Terrain::Water, Terrain::Obstacle];

    pub fn from_char(ch: char) -> Option<Terrain> {
        match ch {
            '.' | 'G' => Some(Terrain::Ground),
            'T' => Some(Terrain::Tree),
            'S' => Some(Terrain::Swamp),
            'W' => Some(Terrain::Water),
            '@' | 'O' => Some(Terrain::Obstacle),
            _ => None,
        }
    }

    /// Canonical character used when writing maps.
    pub fn to_char(self) -> char {
        match self {
            Terrain::Ground => '.',
            Terrain::Tree => 'T',
            Terrain::Swamp => 'S',
            Terrain::Water => 'W',
            Terrain::Obstacle => '@',
        }
    }

    /// Whether the cell stops line of sight.
    pub fn blocks_sight(self) -> bool {
        matches!(self, Terrain::Obstacle | Terrain::Tree)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// Small set of terrain values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TerrainSet(u8);

impl TerrainSet {
    pub fn empty() -> Self {
        TerrainSet(0)
    }

    pub fn contains(self, t: Terrain) -> bool {
        self.0 & t.bit() != 0
    }

    pub fn insert(&mut self, t: Terrain) {
        self.0 |= t.bit();
    }

    pub fn is_superset(self, other: TerrainSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn iter(self) -> impl Iterator<Item = Terrain> {
        Terrain::ALL.into_iter().filter(move |t| self.contains(*t))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl FromIterator<Terrain> for TerrainSet {
    fn from_iter<I: IntoIterator<Item = Terrain>>(iter: I) -> Self {
        let mut s = TerrainSet::empty();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

impl Serialize for TerrainSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for TerrainSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<Terrain> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

/// A robot type: which terrain it can drive/fly over and its rank when
/// contested frontiers are handed out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawClass")]
pub struct AgentClass {
    pub name: String,
    pub passable: TerrainSet,
    pub priority: i32,
}

#[derive(Deserialize)]
struct RawClass {
    name: String,
    passable: TerrainSet,
    priority: i32,
}

impl TryFrom<RawClass> for AgentClass {
    type Error = MapError;

    fn try_from(r: RawClass) -> Result<Self, MapError> {
        AgentClass::new(r.name, r.passable, r.priority)
    }
}

impl AgentClass {
    pub fn new(name: impl Into<String>, passable: TerrainSet, priority: i32) -> Result<Self, MapError> {
        let name = name.into();
        if passable.contains(Terrain::Obstacle) {
            return Err(MapError::ObstaclePassable(name));
        }
        Ok(AgentClass { name, passable, priority })
    }

    /// Ground vehicle: ground only.
    pub fn ground_vehicle() -> Self {
        AgentClass { name: "GV".into(), passable: [Terrain::Ground].into_iter().collect(), priority: 1 }
    }

    /// Aerial vehicle: ground, swamp and water. Trees block it as well.
    pub fn aerial_vehicle() -> Self {
        AgentClass {
            name: "AV".into(),
            passable: [Terrain::Ground, Terrain::Swamp, Terrain::Water].into_iter().collect(),
            priority: 2,
        }
    }

    pub fn can_traverse(&self, t: Terrain) -> bool {
        self.passable.contains(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }

    /// Squared Euclidean distance in cells.
    pub fn dist2(self, other: Cell) -> usize {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Cell) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerrainGrid {
    width: usize,
    height: usize,
    cells: Vec<Terrain>,
}

impl TerrainGrid {
    pub fn new(width: usize, height: usize, cells: Vec<Terrain>) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::Header { line: 0, reason: "width and height must be at least 1".into() });
        }
        if cells.len() != width * height {
            return Err(MapError::Dimension { row: 0, expected: width * height, found: cells.len() });
        }
        Ok(TerrainGrid { width, height, cells })
    }

    pub fn filled(width: usize, height: usize, t: Terrain) -> Self {
        assert!(width > 0 && height > 0, "empty grid");
        TerrainGrid { width, height, cells: vec![t; width * height] }
    }

    /// Builds a grid from rows of terrain characters, without a header.
    pub fn from_rows(rows: &[&str]) -> Result<Self, MapError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::with_capacity(width * height);
        for (row, line) in rows.iter().enumerate() {
            parse_row(line, row, width, &mut cells)?;
        }
        TerrainGrid::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Terrain] {
        &self.cells
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn check(&self, c: Cell) -> Result<usize, MapError> {
        if self.in_bounds(c) {
            Ok(c.y * self.width + c.x)
        } else {
            Err(MapError::OutOfBounds { x: c.x, y: c.y, width: self.width, height: self.height })
        }
    }

    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    #[inline]
    pub fn cell_at(&self, idx: usize) -> Cell {
        Cell::new(idx % self.width, idx / self.width)
    }

    pub fn terrain(&self, c: Cell) -> Result<Terrain, MapError> {
        self.check(c).map(|i| self.cells[i])
    }

    #[inline]
    pub fn terrain_at(&self, idx: usize) -> Terrain {
        self.cells[idx]
    }

    pub fn set(&mut self, c: Cell, t: Terrain) {
        let i = self.index(c);
        self.cells[i] = t;
    }

    pub fn count(&self, t: Terrain) -> usize {
        self.cells.iter().filter(|&&c| c == t).count()
    }

    /// Serializes to MovingAI text with LF line endings.
    pub fn to_movingai(&self) -> String {
        let mut s = format!("type octile\nheight {}\nwidth {}\nmap\n", self.height, self.width);
        for row in self.cells.chunks(self.width) {
            s.extend(row.iter().map(|t| t.to_char()));
            s.push('\n');
        }
        s
    }

    /// Traversability mask for one class, indexed like the grid.
    pub fn passable_mask(&self, class: &AgentClass) -> Vec<bool> {
        self.cells.iter().map(|t| class.can_traverse(*t)).collect()
    }
}

impl FromStr for TerrainGrid {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        parse_map(s)
    }
}

fn parse_row(line: &str, row: usize, width: usize, out: &mut Vec<Terrain>) -> Result<(), MapError> {
    let found = line.chars().count();
    if found != width {
        return Err(MapError::Dimension { row, expected: width, found });
    }
    for (col, ch) in line.chars().enumerate() {
        out.push(Terrain::from_char(ch).ok_or(MapError::Content { row, col, ch })?);
    }
    Ok(())
}

fn header_value(line: Option<&str>, lineno: usize, key: &str) -> Result<usize, MapError> {
    let line = line.ok_or_else(|| MapError::Header { line: lineno, reason: format!("missing `{key}` line") })?;
    let mut parts = line.split(' ');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v.parse::<usize>().map_err(|_| MapError::Header {
            line: lineno,
            reason: format!("`{key}` value {v:?} is not a non-negative integer"),
        }),
        _ => Err(MapError::Header { line: lineno, reason: format!("expected `{key} <n>`, found {line:?}") }),
    }
}

/// Parses a MovingAI `.map` document.
///
/// The header is exactly `type octile`, `height H`, `width W`, `map`, followed
/// by `H` rows of exactly `W` terrain characters. LF and CRLF line endings are
/// accepted; trailing whitespace on a row is a dimension error.
pub fn parse_map(text: &str) -> Result<TerrainGrid, MapError> {
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));

    match lines.next() {
        Some("type octile") => {}
        other => {
            return Err(MapError::Header { line: 1, reason: format!("expected `type octile`, found {:?}", other.unwrap_or("")) })
        }
    }
    let height = header_value(lines.next(), 2, "height")?;
    let width = header_value(lines.next(), 3, "width")?;
    if width == 0 || height == 0 {
        return Err(MapError::Header { line: 2, reason: "width and height must be at least 1".into() });
    }
    match lines.next() {
        Some("map") => {}
        other => return Err(MapError::Header { line: 4, reason: format!("expected `map`, found {:?}", other.unwrap_or("")) }),
    }

    let mut cells = Vec::with_capacity(width * height);
    for row in 0..height {
        let line = lines.next().ok_or(MapError::Dimension { row, expected: width, found: 0 })?;
        parse_row(line, row, width, &mut cells)?;
    }
    // Only blank lines may follow the last row.
    for (extra, line) in lines.enumerate() {
        if !line.is_empty() {
            return Err(MapError::Dimension { row: height + extra, expected: 0, found: line.chars().count() });
        }
    }
    TerrainGrid::new(width, height, cells)
}

/// Whether class `k` may occupy cell `c`.
pub fn traversable(grid: &TerrainGrid, c: Cell, k: &AgentClass) -> Result<bool, MapError> {
    Ok(k.can_traverse(grid.terrain(c)?))
}

/// Cheapest 8-connected path cost from `from` to `to` for class `k`, or
/// `None` when unreachable.
pub fn shortest_path_cost<W: Weight>(grid: &TerrainGrid, from: Cell, to: Cell, k: &AgentClass) -> Result<Option<W>, MapError> {
    let s = grid.check(from)?;
    let t = grid.check(to)?;
    let mask = grid.passable_mask(k);
    if !mask[s] || !mask[t] {
        return Ok(None);
    }
    let pass = Passability::new(grid.width(), grid.height(), &mask);
    Ok(astar_path(&pass, s, t).map(|(c, _)| W::from_u64_saturating(c)))
}

/// Dense symmetric matrix of pairwise costs. Unreachable pairs hold
/// [`Weight::infinity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix<W> {
    n: usize,
    data: Vec<W>,
}

impl<W: Weight> CostMatrix<W> {
    pub fn new(n: usize) -> Self {
        let mut data = vec![W::infinity(); n * n];
        for i in 0..n {
            data[i * n + i] = W::zero();
        }
        CostMatrix { n, data }
    }

    /// Builds from row-major entries; no symmetry check.
    pub fn from_rows(rows: &[Vec<W>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "cost matrix must be square");
            data.extend_from_slice(r);
        }
        CostMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> W {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, w: W) {
        self.data[u * self.n + v] = w;
    }

    pub fn set_symmetric(&mut self, u: usize, v: usize, w: W) {
        self.set(u, v, w);
        self.set(v, u, w);
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| (u + 1..self.n).all(|v| self.get(u, v) == self.get(v, u)))
    }
}

/// Per-class pairwise shortest-path costs among `nodes`.
///
/// One multi-goal Dijkstra per (class, source node); every search stops as
/// soon as all later nodes are settled.
pub fn build_cost_matrices<W: Weight>(
    grid: &TerrainGrid,
    nodes: &[Cell],
    classes: &[AgentClass],
) -> Result<Vec<CostMatrix<W>>, MapError> {
    let idx: Vec<usize> = nodes.iter().map(|&c| grid.check(c)).collect::<Result<_, _>>()?;
    classes
        .iter()
        .map(|class| {
            let mask = grid.passable_mask(class);
            let pass = Passability::new(grid.width(), grid.height(), &mask);
            Ok(matrix_over(&pass, &idx))
        })
        .collect()
}

/// Pairwise costs among grid indices `idx` under `pass`.
pub fn matrix_over<W: Weight>(pass: &Passability<'_>, idx: &[usize]) -> CostMatrix<W> {
    let n = idx.len();
    let mut m = CostMatrix::new(n);
    for (u, &src) in idx.iter().enumerate() {
        if !pass.open(src) || u + 1 == n {
            continue;
        }
        let dist = dijkstra(pass, src, Some(&idx[u + 1..]));
        for v in u + 1..n {
            let d = dist[idx[v]];
            if d != u64::MAX && pass.open(idx[v]) {
                m.set_symmetric(u, v, W::from_u64_saturating(d));
            }
        }
    }
    m
}
