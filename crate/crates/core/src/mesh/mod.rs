//! Structured 2D meshes for the Q1, P1 and P2 families with full edge
//! topology.
//!
//! Node ids are dense. Grid nodes come first in `(y, x)` lexicographic order,
//! followed by cross-split cell centers, followed (for P2) by one midside
//! node per edge in edge-id order. Every element lists its edges in the same
//! local order as its vertices: edge `k` joins local vertex `k` to `k + 1`.

mod generate;
pub mod vtk;

use std::fmt;
use std::str::FromStr;

pub use generate::{classify_boundary, generate_mesh, refine_uniform};

use crate::error::{Error, Result};
use crate::fem::{ElementFamily, ElementGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl Node {
    pub fn coords(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    pub family: ElementFamily,
    /// Corner nodes counterclockwise, then (P2) midside nodes of edges
    /// `v1-v2`, `v2-v3`, `v3-v1`.
    pub nodes: Vec<usize>,
    /// Edge ids in local edge order.
    pub edges: Vec<usize>,
    pub passive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Interior,
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: usize,
    /// Endpoints, oriented as traversed by `elements[0]`.
    pub nodes: [usize; 2],
    pub midside: Option<usize>,
    pub kind: EdgeKind,
    /// One element for boundary edges, two for interior edges.
    pub elements: Vec<usize>,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.elements.len() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    Rectangle,
    /// Left edge spans the full height, the right edge spans `right_height`
    /// centered vertically.
    Trapezoid { right_height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Triangulation {
    /// Two triangles per grid cell, split along the rising diagonal.
    TwoSplit,
    /// Four triangles per grid cell meeting at the cell center.
    #[default]
    CrossSplit,
}

impl FromStr for Triangulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "two_split" | "two-split" => Ok(Triangulation::TwoSplit),
            "cross" | "cross_split" | "cross-split" => Ok(Triangulation::CrossSplit),
            other => Err(Error::Config(format!("unknown triangulation `{other}`"))),
        }
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Triangulation::TwoSplit => "two",
            Triangulation::CrossSplit => "cross",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub shape: DomainShape,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub triangulation: Triangulation,
    pub refine_level: usize,
}

impl DomainSpec {
    pub fn rectangle(width: f64, height: f64, nx: usize, ny: usize) -> Self {
        Self {
            shape: DomainShape::Rectangle,
            width,
            height,
            nx,
            ny,
            triangulation: Triangulation::default(),
            refine_level: 0,
        }
    }

    pub fn trapezoid(width: f64, height: f64, right_height: f64, nx: usize, ny: usize) -> Self {
        Self {
            shape: DomainShape::Trapezoid { right_height },
            ..Self::rectangle(width, height, nx, ny)
        }
    }

    pub fn with_triangulation(mut self, triangulation: Triangulation) -> Self {
        self.triangulation = triangulation;
        self
    }

    pub fn with_refinement(mut self, level: usize) -> Self {
        self.refine_level = level;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidDomain(format!(
                "subdivisions must be positive (nx={}, ny={})",
                self.nx, self.ny
            )));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "extent must be positive (width={}, height={})",
                self.width, self.height
            )));
        }
        if let DomainShape::Trapezoid { right_height } = self.shape {
            if !(right_height > 0.0 && right_height <= self.height) {
                return Err(Error::InvalidDomain(format!(
                    "trapezoid right height {right_height} must lie in (0, {}]",
                    self.height
                )));
            }
        }
        Ok(())
    }

    /// Whether a point lies inside the material domain (boundary included).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let tol = 1e-12 * self.width.max(self.height);
        let [x, y] = p;
        if x < -tol || x > self.width + tol || y < -tol || y > self.height + tol {
            return false;
        }
        match self.shape {
            DomainShape::Rectangle => true,
            DomainShape::Trapezoid { .. } => {
                let (lo, hi) = self.trapezoid_bounds(x);
                y >= lo - tol && y <= hi + tol
            }
        }
    }

    /// Lower and upper boundary of the trapezoid at abscissa `x`.
    pub fn trapezoid_bounds(&self, x: f64) -> (f64, f64) {
        match self.shape {
            DomainShape::Rectangle => (0.0, self.height),
            DomainShape::Trapezoid { right_height } => {
                let drop = 0.5 * (self.height - right_height) * x / self.width;
                (drop, self.height - drop)
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self.shape {
            DomainShape::Rectangle => self.width * self.height,
            DomainShape::Trapezoid { right_height } => 0.5 * (self.height + right_height) * self.width,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub edges: Vec<Edge>,
    pub family: ElementFamily,
    pub domain: DomainSpec,
    /// Number of corner (vertex) nodes; these occupy ids `0..n_vertices`.
    pub n_vertices: usize,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn geometry(&self, element: usize) -> ElementGeometry {
        let el = &self.elements[element];
        let mut coords = [[0.0; 2]; crate::fem::MAX_NODES];
        for (c, &n) in coords.iter_mut().zip(&el.nodes) {
            *c = self.nodes[n].coords();
        }
        ElementGeometry::new(el.id, self.family, &coords[..el.nodes.len()])
            .expect("connectivity length matches family")
    }

    pub fn element_areas(&self) -> Vec<f64> {
        (0..self.n_elements())
            .map(|e| self.geometry(e).signed_area())
            .collect()
    }

    pub fn centroids(&self) -> Vec<[f64; 2]> {
        (0..self.n_elements())
            .map(|e| self.geometry(e).centroid())
            .collect()
    }

    pub fn passive_mask(&self) -> Vec<bool> {
        self.elements.iter().map(|e| e.passive).collect()
    }

    /// Characteristic element size: cell width for quads, `sqrt(mean area)`
    /// for triangles.
    pub fn characteristic_size(&self) -> f64 {
        match self.family {
            ElementFamily::Q1 => {
                let scale = 1u64 << self.domain.refine_level;
                self.domain.width / (self.domain.nx as f64 * scale as f64)
            }
            _ => {
                let areas = self.element_areas();
                (areas.iter().sum::<f64>() / areas.len() as f64).sqrt()
            }
        }
    }

    /// Local index of an edge within an element.
    pub fn local_edge_index(&self, element: usize, edge: usize) -> Option<usize> {
        self.elements[element].edges.iter().position(|&e| e == edge)
    }

    /// Outward unit normal of local edge `k` of an element.
    pub fn outward_normal(&self, element: usize, k: usize) -> [f64; 2] {
        let el = &self.elements[element];
        let nv = self.family.vertices_per_element();
        let a = self.nodes[el.nodes[k]].coords();
        let b = self.nodes[el.nodes[(k + 1) % nv]].coords();
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    }

    /// Node ids lying on boundary edges, sorted ascending.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut flag = vec![false; self.n_nodes()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            for &n in e.nodes.iter().chain(e.midside.iter()) {
                flag[n] = true;
            }
        }
        flag.iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
            .collect()
    }

    /// Index of the node closest to `p`; ties go to the smallest id.
    pub fn nearest_node(&self, p: [f64; 2]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for n in &self.nodes {
            let d = (n.x - p[0]).hypot(n.y - p[1]);
            if d < best.0 {
                best = (d, n.id);
            }
        }
        best.1
    }
}
