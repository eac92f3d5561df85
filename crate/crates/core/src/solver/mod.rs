//! Global assembly with SIMP scaling, Dirichlet elimination and the linear
//! solve `K U = F`.

mod assembly;
mod linear;
mod sparse;

pub use assembly::{apply_dirichlet, assemble, load_vector, Assembler, GlobalSystem, ReducedSystem};
pub use linear::{solve, LinearSolver, SolveResult, SolverKind};
pub use sparse::CscMatrix;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Global dof numbering: node `i` owns `2i` (x) and `2i + 1` (y).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    pub n_nodes: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        Self {
            n_nodes: mesh.n_nodes(),
        }
    }

    pub fn dofs(&self, node: usize) -> [usize; 2] {
        [2 * node, 2 * node + 1]
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes
    }

    /// Interleaved dofs of a connectivity list.
    pub fn element_dofs(&self, nodes: &[usize]) -> Vec<usize> {
        nodes.iter().flat_map(|&n| self.dofs(n)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    West,
    East,
    South,
    North,
}

/// Mesh-independent description of a set of nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSelector {
    /// Every node on one side of the domain's bounding box.
    Side(BoundarySide),
    /// The single node closest to a point.
    NearestTo([f64; 2]),
    Ids(Vec<usize>),
}

impl NodeSelector {
    pub fn resolve(&self, mesh: &Mesh) -> Result<Vec<usize>> {
        match self {
            NodeSelector::Side(side) => {
                let d = &mesh.domain;
                let tol = 1e-9 * d.width.max(d.height);
                let on = |x: f64, y: f64| match side {
                    BoundarySide::West => x.abs() <= tol,
                    BoundarySide::East => (x - d.width).abs() <= tol,
                    BoundarySide::South => y.abs() <= tol,
                    BoundarySide::North => (y - d.height).abs() <= tol,
                };
                Ok(mesh.nodes.iter().filter(|n| on(n.x, n.y)).map(|n| n.id).collect())
            }
            NodeSelector::NearestTo(p) => Ok(vec![mesh.nearest_node(*p)]),
            NodeSelector::Ids(ids) => {
                if let Some(bad) = ids.iter().find(|&&i| i >= mesh.n_nodes()) {
                    return Err(Error::InvalidLoadCase(format!(
                        "node {bad} does not exist (mesh has {} nodes)",
                        mesh.n_nodes()
                    )));
                }
                Ok(ids.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointLoad {
    pub at: NodeSelector,
    pub force: [f64; 2],
}

/// Uniform traction on the Neumann edges of one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traction {
    pub side: BoundarySide,
    pub value: [f64; 2],
}

/// Supports and loads. Supported nodes have both displacement components
/// fixed at zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadCase {
    pub supports: Vec<NodeSelector>,
    pub point_loads: Vec<PointLoad>,
    pub tractions: Vec<Traction>,
    pub body_force: [f64; 2],
}

impl LoadCase {
    /// Sorted, deduplicated supported node ids.
    pub fn dirichlet_nodes(&self, mesh: &Mesh) -> Result<Vec<usize>> {
        let mut nodes = Vec::new();
        for s in &self.supports {
            nodes.extend(s.resolve(mesh)?);
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(nodes)
    }

    /// Traction prescribed on a boundary edge given its endpoints.
    pub fn traction_on(&self, mesh: &Mesh, edge: &crate::mesh::Edge) -> [f64; 2] {
        let d = &mesh.domain;
        let tol = 1e-9 * d.width.max(d.height);
        let pts = edge.nodes.map(|n| mesh.nodes[n].coords());
        let mut g = [0.0; 2];
        for t in &self.tractions {
            let on = pts.iter().all(|p| match t.side {
                BoundarySide::West => p[0].abs() <= tol,
                BoundarySide::East => (p[0] - d.width).abs() <= tol,
                BoundarySide::South => p[1].abs() <= tol,
                BoundarySide::North => (p[1] - d.height).abs() <= tol,
            });
            if on {
                g[0] += t.value[0];
                g[1] += t.value[1];
            }
        }
        g
    }
}
