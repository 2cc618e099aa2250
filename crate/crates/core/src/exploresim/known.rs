use crate::gridmap::{AgentClass, Cell, Terrain, TerrainGrid};

/// What the team has seen so far. Cells go from unknown to known exactly
/// once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownGrid {
    width: usize,
    height: usize,
    cells: Vec<Option<Terrain>>,
    known: usize,
}

impl KnownGrid {
    pub fn new(width: usize, height: usize) -> Self {
        KnownGrid { width, height, cells: vec![None; width * height], known: 0 }
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

    pub fn known_count(&self) -> usize {
        self.known
    }

    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    pub fn cell_at(&self, idx: usize) -> Cell {
        Cell::new(idx % self.width, idx / self.width)
    }

    pub fn get(&self, c: Cell) -> Option<Terrain> {
        self.cells[self.index(c)]
    }

    pub fn get_at(&self, idx: usize) -> Option<Terrain> {
        self.cells[idx]
    }

    /// Records terrain for a cell; returns whether it was unknown before.
    pub fn reveal(&mut self, c: Cell, t: Terrain) -> bool {
        let i = self.index(c);
        if self.cells[i].is_some() {
            return false;
        }
        self.cells[i] = Some(t);
        self.known += 1;
        true
    }

    /// Known cells the class can stand on.
    pub fn known_mask(&self, class: &AgentClass) -> Vec<bool> {
        self.cells.iter().map(|c| c.is_some_and(|t| class.can_traverse(t))).collect()
    }

    /// Like [`known_mask`](Self::known_mask) but unknown cells count as open.
    pub fn optimistic_mask(&self, class: &AgentClass) -> Vec<bool> {
        self.cells.iter().map(|c| c.is_none_or(|t| class.can_traverse(t))).collect()
    }

    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = ((idx % self.width) as isize, (idx / self.width) as isize);
        let (w, h) = (self.width as isize, self.height as isize);
        (-1isize..=1)
            .flat_map(move |dy| (-1isize..=1).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| dx != 0 || dy != 0)
            .filter_map(move |(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                (nx >= 0 && ny >= 0 && nx < w && ny < h).then_some((ny * w + nx) as usize)
            })
    }

    pub fn borders_unknown(&self, idx: usize) -> bool {
        self.neighbors8(idx).any(|n| self.cells[n].is_none())
    }
}

/// Cells on the integer line from `a` to `b`, both ends included.
pub fn bresenham(a: Cell, b: Cell) -> Vec<Cell> {
    let (mut x, mut y) = (a.x as isize, a.y as isize);
    let (x1, y1) = (b.x as isize, b.y as isize);
    let dx = (x1 - x).abs();
    let dy = -(y1 - y).abs();
    let sx = if x < x1 { 1 } else { -1 };
    let sy = if y < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = vec![a];
    while (x, y) != (x1, y1) {
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
        out.push(Cell::new(x as usize, y as usize));
    }
    out
}

/// Whether nothing strictly between `from` and `to` blocks sight.
pub fn line_of_sight(truth: &TerrainGrid, from: Cell, to: Cell) -> bool {
    let line = bresenham(from, to);
    if line.len() <= 2 {
        return true;
    }
    line[1..line.len() - 1].iter().all(|&c| !truth.terrain_at(truth.index(c)).blocks_sight())
}

/// Reveals every cell within Euclidean radius `r` of `at` that is in line of
/// sight. Sight blockers are revealed themselves but hide what lies behind.
/// Returns the newly known cells in row-major order.
pub fn sense(known: &mut KnownGrid, truth: &TerrainGrid, at: Cell, r: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    let (x0, x1) = (at.x.saturating_sub(r), (at.x + r).min(truth.width() - 1));
    let (y0, y1) = (at.y.saturating_sub(r), (at.y + r).min(truth.height() - 1));
    for y in y0..=y1 {
        for x in x0..=x1 {
            let c = Cell::new(x, y);
            if c.dist2(at) > r * r || known.get(c).is_some() || !line_of_sight(truth, at, c) {
                continue;
            }
            if known.reveal(c, truth.terrain_at(truth.index(c))) {
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_reveals_own_cell() {
        let truth = TerrainGrid::filled(5, 5, Terrain::Ground);
        let mut k = KnownGrid::new(5, 5);
        let got = sense(&mut k, &truth, Cell::new(2, 2), 0);
        assert_eq!(got, vec![Cell::new(2, 2)]);
        assert_eq!(k.known_count(), 1);
    }

    #[test]
    fn open_field_disk() {
        let truth = TerrainGrid::filled(11, 11, Terrain::Ground);
        let mut k = KnownGrid::new(11, 11);
        let at = Cell::new(5, 5);
        sense(&mut k, &truth, at, 3);
        for idx in 0..k.len() {
            let c = k.cell_at(idx);
            assert_eq!(k.get(c).is_some(), c.dist2(at) <= 9, "{c}");
        }
        // Lattice points with x^2 + y^2 <= 9.
        assert_eq!(k.known_count(), 29);
    }

    #[test]
    fn wall_hides_cells_behind_it() {
        // Robot at (0,2) looking east along row 2; wall at (2,2).
        let truth = TerrainGrid::from_rows(&[".....", ".....", "..@..", ".....", "....."]).unwrap();
        let mut k = KnownGrid::new(5, 5);
        sense(&mut k, &truth, Cell::new(0, 2), 4);
        assert_eq!(k.get(Cell::new(2, 2)), Some(Terrain::Obstacle));
        // Ray (0,2)->(3,2) passes (1,2),(2,2): blocked.
        assert_eq!(k.get(Cell::new(3, 2)), None);
        assert_eq!(k.get(Cell::new(4, 2)), None);
        // Ray (0,2)->(3,1) passes (1,2),(2,1): clear.
        assert_eq!(bresenham(Cell::new(0, 2), Cell::new(3, 1)), vec![Cell::new(0, 2), Cell::new(1, 2), Cell::new(2, 1), Cell::new(3, 1)]);
        assert!(k.get(Cell::new(3, 1)).is_some());
    }

    #[test]
    fn trees_block_water_does_not() {
        let truth = TerrainGrid::from_rows(&[".T.", "...", ".W."]).unwrap();
        let mut k = KnownGrid::new(3, 3);
        sense(&mut k, &truth, Cell::new(1, 0), 0);
        sense(&mut k, &truth, Cell::new(0, 0), 2);
        assert_eq!(k.get(Cell::new(2, 0)), None);
        assert!(k.get(Cell::new(1, 0)).is_some());
        assert!(k.get(Cell::new(0, 2)).is_some());
        let mut k2 = KnownGrid::new(3, 3);
        sense(&mut k2, &truth, Cell::new(1, 0), 2);
        assert!(k2.get(Cell::new(1, 2)).is_some());
    }

    #[test]
    fn knowledge_is_monotone() {
        let truth = TerrainGrid::filled(4, 4, Terrain::Ground);
        let mut k = KnownGrid::new(4, 4);
        sense(&mut k, &truth, Cell::new(0, 0), 2);
        let before = k.known_count();
        assert!(sense(&mut k, &truth, Cell::new(0, 0), 2).is_empty());
        assert!(!k.reveal(Cell::new(0, 0), Terrain::Water));
        assert_eq!(k.get(Cell::new(0, 0)), Some(Terrain::Ground));
        assert_eq!(k.known_count(), before);
    }

    #[test]
    fn masks() {
        let mut k = KnownGrid::new(2, 1);
        k.reveal(Cell::new(0, 0), Terrain::Water);
        let gv = AgentClass::ground_vehicle();
        assert_eq!(k.known_mask(&gv), vec![false, false]);
        assert_eq!(k.optimistic_mask(&gv), vec![false, true]);
        assert_eq!(k.known_mask(&AgentClass::aerial_vehicle()), vec![true, false]);
        assert!(k.borders_unknown(0));
    }
}
