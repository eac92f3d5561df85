//! SIMP compliance minimization over 2D linear-elastic finite element models.
//!
//! Three element families are supported: the bilinear quadrilateral (Q1), the
//! linear triangle (P1) and the quadratic triangle (P2). Besides the
//! optimization loop the crate ships a residual-based a posteriori error
//! estimator used to compare the discretization quality of the families on
//! the cantilever, bridge and beveled-beam benchmarks.
//!
//! The pipeline is
//!
//! 1. [`mesh::generate_mesh`] builds a structured mesh from a [`mesh::DomainSpec`],
//! 2. [`solver::Assembler`] assembles `K(x) U = F` with SIMP scaling,
//! 3. [`optimizer::optimize`] runs the optimality-criteria loop,
//! 4. [`estimator::estimate`] evaluates the error indicators on a solution.
//!
//! [`bench`] wires everything together behind benchmark presets and file
//! exporters; the `topopt` binary is a thin CLI over it.

pub mod bench;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod mesh;
pub mod optimizer;
pub mod solver;

pub use error::{Error, Result};
pub use fem::{ElementFamily, Material, MaterialModel};
pub use mesh::{DomainShape, DomainSpec, Mesh, Triangulation};
