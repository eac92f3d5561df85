//! Element-level machinery: material law, shape functions, quadrature,
//! strain-displacement matrices and element stiffness.

mod element;
mod material;
pub mod quadrature;
mod shape;

use std::fmt;
use std::str::FromStr;

pub use element::{
    b_matrix, element_stiffness, element_stiffness_with_rule, physical_shape, strain_energy,
    ElementGeometry, ElementStiffness, PhysicalShape,
};
pub use material::{Material, MaterialModel};
pub use quadrature::QuadratureRule;
pub use shape::{shape_functions, shape_hessians, ShapeEval, MAX_NODES};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementFamily {
    Q1,
    P1,
    P2,
}

impl ElementFamily {
    pub const ALL: [ElementFamily; 3] = [ElementFamily::Q1, ElementFamily::P1, ElementFamily::P2];

    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementFamily::Q1 => 4,
            ElementFamily::P1 => 3,
            ElementFamily::P2 => 6,
        }
    }

    /// Number of corner vertices (3 for triangles, 4 for quads).
    pub fn vertices_per_element(self) -> usize {
        match self {
            ElementFamily::Q1 => 4,
            ElementFamily::P1 | ElementFamily::P2 => 3,
        }
    }

    pub fn is_triangle(self) -> bool {
        !matches!(self, ElementFamily::Q1)
    }

    /// Polynomial order of the displacement interpolation along an edge.
    pub fn order(self) -> usize {
        match self {
            ElementFamily::Q1 | ElementFamily::P1 => 1,
            ElementFamily::P2 => 2,
        }
    }

    /// Reference coordinates of the corner vertices, counterclockwise.
    pub fn reference_vertices(self) -> &'static [[f64; 2]] {
        match self {
            ElementFamily::Q1 => &[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            ElementFamily::P1 | ElementFamily::P2 => &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Reference coordinates of every node in connectivity order.
    pub fn reference_nodes(self) -> &'static [[f64; 2]] {
        match self {
            ElementFamily::P2 => &[
                [0.0, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [0.5, 0.0],
                [0.5, 0.5],
                [0.0, 0.5],
            ],
            _ => self.reference_vertices(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ElementFamily::Q1 => "Q1",
            ElementFamily::P1 => "P1",
            ElementFamily::P2 => "P2",
        }
    }
}

impl fmt::Display for ElementFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ElementFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "q1" => Ok(ElementFamily::Q1),
            "p1" => Ok(ElementFamily::P1),
            "p2" => Ok(ElementFamily::P2),
            other => Err(Error::Config(format!("unknown element family `{other}`"))),
        }
    }
}
