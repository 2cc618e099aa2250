//! JSON instance documents. Cost matrices are never stored; they are
//! recomputed from the referenced map on load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AgentSet, InstanceError, MhppInstance};
use crate::gridmap::{parse_map, AgentClass, Cell, TerrainGrid};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub x: usize,
    pub y: usize,
    pub capable: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub id: usize,
    pub class: String,
    pub start: Cell,
    pub goal: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    /// Map path, resolved relative to the instance document's directory.
    pub map: String,
    pub classes: Vec<AgentClass>,
    pub nodes: Vec<NodeRecord>,
    pub agents: Vec<AgentRecord>,
    pub seed: Option<u64>,
}

fn io_err(path: &Path, source: std::io::Error) -> InstanceError {
    InstanceError::Io { path: path.display().to_string(), source }
}

impl InstanceFile {
    /// Describes a grid-backed instance. Fails for instances built from
    /// explicit matrices, which have no cells.
    pub fn from_instance<W: Weight>(inst: &MhppInstance<W>, map: &str) -> Result<Self, InstanceError> {
        let missing = || InstanceError::Generation("instance has no grid cells to serialize".into());
        let nodes = inst
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let c = n.cell.ok_or_else(missing)?;
                Ok(NodeRecord { id, x: c.x, y: c.y, capable: inst.capable_classes(id) })
            })
            .collect::<Result<_, InstanceError>>()?;
        let agents = inst
            .agents()
            .iter()
            .enumerate()
            .map(|(id, a)| {
                Ok(AgentRecord {
                    id,
                    class: inst.classes()[a.class].name.clone(),
                    start: a.start.ok_or_else(missing)?,
                    goal: a.goal.ok_or_else(missing)?,
                })
            })
            .collect::<Result<_, InstanceError>>()?;
        Ok(InstanceFile { map: map.to_string(), classes: inst.classes().to_vec(), nodes, agents, seed: inst.seed() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds the instance on `grid`, recomputing all costs.
    pub fn build<W: Weight>(&self, grid: &TerrainGrid) -> Result<MhppInstance<W>, InstanceError> {
        let class_index = |name: &str| {
            self.classes
                .iter()
                .position(|c| c.name == name)
                .ok_or_else(|| InstanceError::Generation(format!("unknown class {name:?}")))
        };
        let agent_class: Vec<usize> = self.agents.iter().map(|a| class_index(&a.class)).collect::<Result<_, _>>()?;
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (pos, n) in self.nodes.iter().enumerate() {
            if n.id != pos {
                return Err(InstanceError::Generation(format!("node ids must be 0..N in order, found {} at {pos}", n.id)));
            }
            let mut cap = AgentSet::empty();
            for name in &n.capable {
                let k = class_index(name)?;
                agent_class.iter().enumerate().filter(|(_, &c)| c == k).for_each(|(i, _)| cap.insert(i));
            }
            nodes.push((Cell::new(n.x, n.y), cap));
        }
        for (pos, a) in self.agents.iter().enumerate() {
            if a.id != pos {
                return Err(InstanceError::Generation(format!("agent ids must be 0..A in order, found {} at {pos}", a.id)));
            }
        }
        let agents = self.agents.iter().zip(&agent_class).map(|(a, &k)| (k, a.start, a.goal)).collect();
        Ok(MhppInstance::from_grid(grid, self.classes.clone(), nodes, agents)?
            .with_provenance(Some(self.map.clone()), self.seed))
    }

    pub fn write(&self, path: &Path) -> Result<(), InstanceError> {
        fs::write(path, self.to_json()).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, InstanceError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_json(&text)
    }

    /// Map path resolved against the directory holding `doc_path`.
    pub fn map_path(&self, doc_path: &Path) -> PathBuf {
        let p = Path::new(&self.map);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            doc_path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}

pub fn read_map(path: &Path) -> Result<TerrainGrid, InstanceError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(parse_map(&text)?)
}

/// Reads an instance document and its map, recomputing costs.
pub fn load_instance<W: Weight>(path: &Path) -> Result<MhppInstance<W>, InstanceError> {
    let file = InstanceFile::read(path)?;
    let grid = read_map(&file.map_path(path))?;
    file.build(&grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::Terrain;
    use crate::instance::{generate_random_instance, GoalMode};

    #[test]
    fn document_round_trip_rebuilds_same_costs() {
        let mut g = TerrainGrid::filled(10, 6, Terrain::Ground);
        for y in 0..6 {
            g.set(Cell::new(6, y), Terrain::Water);
        }
        let fleet = [(AgentClass::ground_vehicle(), 1), (AgentClass::aerial_vehicle(), 2)];
        let inst = generate_random_instance::<u64>(&g, 6, &fleet, 5, GoalMode::Distinct).unwrap();
        let doc = InstanceFile::from_instance(&inst, "tiny.map").unwrap();
        let parsed = InstanceFile::from_json(&doc.to_json()).unwrap();
        assert_eq!(parsed, doc);
        let rebuilt: MhppInstance<u64> = parsed.build(&g).unwrap();
        assert_eq!(rebuilt.nodes(), inst.nodes());
        assert_eq!(rebuilt.matrices(), inst.matrices());
        assert_eq!(rebuilt.seed(), Some(5));
        assert!(doc.to_json().contains("\"capable\""));
    }

    #[test]
    fn unknown_class_rejected() {
        let json = r#"{"map":"m.map","classes":[],"nodes":[],"agents":[{"id":0,"class":"GV","start":{"x":0,"y":0},"goal":{"x":0,"y":0}}],"seed":null}"#;
        let doc = InstanceFile::from_json(json).unwrap();
        let g = TerrainGrid::filled(2, 2, Terrain::Ground);
        assert!(doc.build::<u64>(&g).is_err());
    }
}
