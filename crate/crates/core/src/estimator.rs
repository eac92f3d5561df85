//! Residual-based a posteriori error estimation.
//!
//! For a discrete displacement `u_h` the estimator collects three residuals:
//!
//! * bulk: `h_K^2 ||f + div sigma(u_h)||^2` over each element,
//! * jump: `h_e ||[[sigma(u_h) n]]||^2` over each interior edge,
//! * Neumann: `h_e ||g - sigma(u_h) n||^2` over each Neumann edge.
//!
//! The local indicator of an element is its bulk term, half of each adjacent
//! interior-edge jump and its Neumann terms, so that the local indicators sum
//! to `bulk_total + jump_total + neumann_total` with every interior edge
//! counted once. The global estimator is the square root of that sum.

use crate::error::{Error, Result};
use crate::fem::{physical_shape, quadrature, ElementFamily, Material, QuadratureRule};
use crate::mesh::{Edge, EdgeKind, Mesh};
use crate::solver::LoadCase;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementIndicator {
    pub element: usize,
    pub h: f64,
    pub bulk: f64,
    /// Half of the jump contribution of each interior edge of the element.
    pub jump_half_sum: f64,
    pub neumann: f64,
    pub eta_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBreakdown {
    pub bulk_total: f64,
    pub jump_total: f64,
    pub neumann_total: f64,
    pub local: Vec<ElementIndicator>,
    pub eta_global: f64,
}

impl ErrorBreakdown {
    pub fn eta_sq(&self) -> f64 {
        self.eta_global * self.eta_global
    }

    pub fn local_sum(&self) -> f64 {
        self.local.iter().map(|l| l.eta_sq).sum()
    }
}

/// Tractions of both sides of an interior edge (or the single side of a
/// boundary edge) at the edge quadrature points.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTraction {
    pub edge: usize,
    /// `sigma n` from `elements[0]`, with that element's outward normal.
    pub first: Vec<[f64; 2]>,
    /// `sigma n` from `elements[1]`, with that element's outward normal.
    pub second: Option<Vec<[f64; 2]>>,
}

/// Stress evaluation for a displacement field, optionally scaled per
/// element (SIMP stiffness `x_e^p`).
#[derive(Debug, Clone)]
pub struct Estimator<'a> {
    mesh: &'a Mesh,
    u: &'a [f64],
    elasticity: nalgebra::Matrix3<f64>,
    scale: Option<Vec<f64>>,
}

impl<'a> Estimator<'a> {
    pub fn new(mesh: &'a Mesh, u: &'a [f64], material: &Material) -> Result<Self> {
        if u.len() != mesh.n_dofs() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_dofs(),
                actual: u.len(),
            });
        }
        Ok(Self {
            mesh,
            u,
            elasticity: material.elasticity_matrix(),
            scale: None,
        })
    }

    /// Evaluate stresses with element stiffness multiplied by `scale[e]`.
    pub fn with_stiffness_scale(mut self, scale: Vec<f64>) -> Result<Self> {
        if scale.len() != self.mesh.n_elements() {
            return Err(Error::DimensionMismatch {
                expected: self.mesh.n_elements(),
                actual: scale.len(),
            });
        }
        self.scale = Some(scale);
        Ok(self)
    }

    fn scale(&self, element: usize) -> f64 {
        self.scale.as_ref().map_or(1.0, |s| s[element])
    }

    /// `(sigma_xx, sigma_yy, sigma_xy)` at a reference point of an element.
    pub fn stress(&self, element: usize, xi: [f64; 2]) -> Result<[f64; 3]> {
        let geom = self.mesh.geometry(element);
        let ps = physical_shape(&geom, xi)?;
        let mut eps = [0.0; 3];
        for (k, &n) in self.mesh.elements[element].nodes.iter().enumerate() {
            let (ux, uy) = (self.u[2 * n], self.u[2 * n + 1]);
            let [gx, gy] = ps.grads[k];
            eps[0] += gx * ux;
            eps[1] += gy * uy;
            eps[2] += gy * ux + gx * uy;
        }
        Ok(self.apply_elasticity(element, eps))
    }

    fn apply_elasticity(&self, element: usize, eps: [f64; 3]) -> [f64; 3] {
        let a = &self.elasticity;
        let s = self.scale(element);
        [0, 1, 2].map(|i| s * (a[(i, 0)] * eps[0] + a[(i, 1)] * eps[1] + a[(i, 2)] * eps[2]))
    }

    /// `div sigma(u_h)` at a reference point of an element.
    pub fn stress_divergence(&self, element: usize, xi: [f64; 2]) -> Result<[f64; 2]> {
        let geom = self.mesh.geometry(element);
        let ps = physical_shape(&geom, xi)?;
        // strain derivatives along x and y
        let mut dx = [0.0; 3];
        let mut dy = [0.0; 3];
        for (k, &n) in self.mesh.elements[element].nodes.iter().enumerate() {
            let (ux, uy) = (self.u[2 * n], self.u[2 * n + 1]);
            let [hxx, hxy, hyy] = ps.hessians[k];
            dx[0] += hxx * ux;
            dx[1] += hxy * uy;
            dx[2] += hxy * ux + hxx * uy;
            dy[0] += hxy * ux;
            dy[1] += hyy * uy;
            dy[2] += hyy * ux + hxy * uy;
        }
        let sx = self.apply_elasticity(element, dx);
        let sy = self.apply_elasticity(element, dy);
        Ok([sx[0] + sy[2], sx[2] + sy[1]])
    }

    /// Per-element `h_K^2 ||f + div sigma(u_h)||^2_{0,K}`.
    pub fn bulk_residual(&self, body_force: [f64; 2]) -> Result<Vec<f64>> {
        let mesh = self.mesh;
        if mesh.family == ElementFamily::P1 && body_force == [0.0, 0.0] {
            // second derivatives of linear fields vanish
            return Ok(vec![0.0; mesh.n_elements()]);
        }
        let rule = bulk_rule(mesh.family);
        (0..mesh.n_elements())
            .map(|e| {
                let geom = mesh.geometry(e);
                let h = geom.diameter();
                let mut integral = 0.0;
                for (xi, w) in rule.points.iter().zip(&rule.weights) {
                    let ps = physical_shape(&geom, *xi)?;
                    let d = self.stress_divergence(e, *xi)?;
                    let r = [body_force[0] + d[0], body_force[1] + d[1]];
                    integral += w * ps.det * rule.reference_measure * (r[0] * r[0] + r[1] * r[1]);
                }
                Ok(h * h * integral)
            })
            .collect()
    }

    /// Reference coordinates of edge point `t` (from `edge.nodes[0]` to
    /// `edge.nodes[1]`) seen from one adjacent element, plus its local edge
    /// index.
    fn edge_point(&self, element: usize, edge: &Edge, t: f64) -> Result<([f64; 2], usize)> {
        let mesh = self.mesh;
        let k = mesh.local_edge_index(element, edge.id).ok_or_else(|| {
            Error::Topology(format!("element {element} does not list edge {}", edge.id))
        })?;
        let el = &mesh.elements[element];
        let nv = mesh.family.vertices_per_element();
        let rv = mesh.family.reference_vertices();
        let (a, b) = (rv[k], rv[(k + 1) % nv]);
        let s = if el.nodes[k] == edge.nodes[0] { t } else { 1.0 - t };
        Ok(([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])], k))
    }

    fn side_traction(&self, element: usize, edge: &Edge) -> Result<Vec<[f64; 2]>> {
        quadrature::edge_rule()
            .iter()
            .map(|&(t, _)| {
                let (xi, k) = self.edge_point(element, edge, t)?;
                let n = self.mesh.outward_normal(element, k);
                let s = self.stress(element, xi)?;
                Ok([s[0] * n[0] + s[2] * n[1], s[2] * n[0] + s[1] * n[1]])
            })
            .collect()
    }

    pub fn edge_traction(&self, edge: usize) -> Result<EdgeTraction> {
        let e = &self.mesh.edges[edge];
        let first = self.side_traction(e.elements[0], e)?;
        let second = match e.elements.get(1) {
            Some(&other) => Some(self.side_traction(other, e)?),
            None => None,
        };
        Ok(EdgeTraction {
            edge,
            first,
            second,
        })
    }

    /// `h_e ||[[sigma(u_h) n]]||^2_{0,e}` for every interior edge, as
    /// `(edge id, value)` in edge order.
    pub fn jump_residual(&self) -> Result<Vec<(usize, f64)>> {
        let rule = quadrature::edge_rule();
        let mut out = Vec::new();
        for e in self.mesh.edges.iter().filter(|e| e.kind == EdgeKind::Interior) {
            if e.elements.len() != 2 {
                return Err(Error::Topology(format!(
                    "interior edge {} has {} adjacent elements",
                    e.id,
                    e.elements.len()
                )));
            }
            let tr = self.edge_traction(e.id)?;
            let second = tr.second.expect("two sides");
            let mut integral = 0.0;
            for ((p, m), (_, w)) in tr.first.iter().zip(&second).zip(rule) {
                let j = [p[0] + m[0], p[1] + m[1]];
                integral += w * e.length * (j[0] * j[0] + j[1] * j[1]);
            }
            out.push((e.id, e.length * integral));
        }
        Ok(out)
    }

    /// `h_e ||g - sigma(u_h) n||^2_{0,e}` for every Neumann edge.
    pub fn neumann_residual(&self, case: &LoadCase) -> Result<Vec<(usize, f64)>> {
        let kinds = boundary_kinds(self.mesh, case)?;
        let rule = quadrature::edge_rule();
        let mut out = Vec::new();
        for e in self.mesh.edges.iter() {
            if kinds[e.id] != EdgeKind::Neumann {
                continue;
            }
            let g = case.traction_on(self.mesh, e);
            let tr = self.side_traction(e.elements[0], e)?;
            let mut integral = 0.0;
            for (s, (_, w)) in tr.iter().zip(rule) {
                let r = [g[0] - s[0], g[1] - s[1]];
                integral += w * e.length * (r[0] * r[0] + r[1] * r[1]);
            }
            out.push((e.id, e.length * integral));
        }
        Ok(out)
    }

    pub fn estimate(&self, case: &LoadCase) -> Result<ErrorBreakdown> {
        let mesh = self.mesh;
        let bulk = self.bulk_residual(case.body_force)?;
        let jumps = self.jump_residual()?;
        let neumann = self.neumann_residual(case)?;

        let mut local: Vec<ElementIndicator> = bulk
            .iter()
            .enumerate()
            .map(|(e, &b)| ElementIndicator {
                element: e,
                h: mesh.geometry(e).diameter(),
                bulk: b,
                jump_half_sum: 0.0,
                neumann: 0.0,
                eta_sq: 0.0,
            })
            .collect();
        for &(edge, value) in &jumps {
            for &el in &mesh.edges[edge].elements {
                local[el].jump_half_sum += 0.5 * value;
            }
        }
        for &(edge, value) in &neumann {
            local[mesh.edges[edge].elements[0]].neumann += value;
        }
        for l in &mut local {
            l.eta_sq = l.bulk + l.jump_half_sum + l.neumann;
        }

        let bulk_total: f64 = bulk.iter().sum();
        let jump_total: f64 = jumps.iter().map(|j| j.1).sum();
        let neumann_total: f64 = neumann.iter().map(|n| n.1).sum();
        let eta_global = local.iter().map(|l| l.eta_sq).sum::<f64>().sqrt();
        Ok(ErrorBreakdown {
            bulk_total,
            jump_total,
            neumann_total,
            local,
            eta_global,
        })
    }
}

fn bulk_rule(family: ElementFamily) -> QuadratureRule {
    match family {
        ElementFamily::Q1 => QuadratureRule::square_gauss(3),
        _ => QuadratureRule::triangle_7(),
    }
}

/// Edge kinds under a load case: boundary edges with both endpoints
/// supported are Dirichlet, the rest Neumann.
fn boundary_kinds(mesh: &Mesh, case: &LoadCase) -> Result<Vec<EdgeKind>> {
    let mut fixed = vec![false; mesh.n_nodes()];
    for n in case.dirichlet_nodes(mesh)? {
        fixed[n] = true;
    }
    Ok(mesh
        .edges
        .iter()
        .map(|e| {
            if !e.is_boundary() {
                EdgeKind::Interior
            } else if e.nodes.iter().all(|&n| fixed[n]) {
                EdgeKind::Dirichlet
            } else {
                EdgeKind::Neumann
            }
        })
        .collect())
}

/// Per-element bulk residuals of a solid model.
pub fn bulk_residual(mesh: &Mesh, u: &[f64], material: &Material, body_force: [f64; 2]) -> Result<Vec<f64>> {
    Estimator::new(mesh, u, material)?.bulk_residual(body_force)
}

/// Per-interior-edge jump residuals of a solid model.
pub fn jump_residual(mesh: &Mesh, u: &[f64], material: &Material) -> Result<Vec<(usize, f64)>> {
    Estimator::new(mesh, u, material)?.jump_residual()
}

/// Per-Neumann-edge residuals of a solid model.
pub fn neumann_residual(mesh: &Mesh, u: &[f64], material: &Material, case: &LoadCase) -> Result<Vec<(usize, f64)>> {
    Estimator::new(mesh, u, material)?.neumann_residual(case)
}

/// Full error breakdown of a solid model.
pub fn estimate(mesh: &Mesh, u: &[f64], material: &Material, case: &LoadCase) -> Result<ErrorBreakdown> {
    Estimator::new(mesh, u, material)?.estimate(case)
}
