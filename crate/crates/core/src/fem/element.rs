use nalgebra::{DMatrix, DVector, Matrix3xX};

use super::quadrature::QuadratureRule;
use super::shape::{shape_functions, shape_hessians, MAX_NODES};
use super::{ElementFamily, Material};
use crate::error::{Error, Result};

/// Nodal coordinates of one element, in connectivity order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub id: usize,
    pub family: ElementFamily,
    coords: [[f64; 2]; MAX_NODES],
}

impl ElementGeometry {
    pub fn new(id: usize, family: ElementFamily, coords: &[[f64; 2]]) -> Result<Self> {
        let n = family.nodes_per_element();
        if coords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: coords.len(),
            });
        }
        let mut c = [[0.0; 2]; MAX_NODES];
        c[..n].copy_from_slice(coords);
        Ok(Self {
            id,
            family,
            coords: c,
        })
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords[..self.family.nodes_per_element()]
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.coords[..self.family.vertices_per_element()]
    }

    /// Physical location of a reference point.
    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        let s = shape_functions(self.family, xi);
        let mut p = [0.0; 2];
        for (v, c) in s.values().iter().zip(self.coords()) {
            p[0] += v * c[0];
            p[1] += v * c[1];
        }
        p
    }

    /// Shoelace area of the vertex polygon (positive when counterclockwise).
    pub fn signed_area(&self) -> f64 {
        let v = self.vertices();
        let n = v.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let v = self.vertices();
        match self.family {
            ElementFamily::Q1 => {
                // area-weighted split into two triangles
                let t = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
                    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
                    (area, [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0])
                };
                let (a1, c1) = t(v[0], v[1], v[2]);
                let (a2, c2) = t(v[0], v[2], v[3]);
                let a = a1 + a2;
                [(a1 * c1[0] + a2 * c2[0]) / a, (a1 * c1[1] + a2 * c2[1]) / a]
            }
            _ => [
                (v[0][0] + v[1][0] + v[2][0]) / 3.0,
                (v[0][1] + v[1][1] + v[2][1]) / 3.0,
            ],
        }
    }

    /// Longest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max((v[i][0] - v[j][0]).hypot(v[i][1] - v[j][1]));
            }
        }
        d
    }
}

/// Shape data pulled back to physical coordinates.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalShape {
    pub len: usize,
    pub values: [f64; MAX_NODES],
    /// `(dN/dx, dN/dy)`
    pub grads: [[f64; 2]; MAX_NODES],
    /// `(d2N/dx2, d2N/dxdy, d2N/dy2)`
    pub hessians: [[f64; 3]; MAX_NODES],
    pub det: f64,
}

/// Evaluates shape functions and their physical first and second derivatives.
pub fn physical_shape(geom: &ElementGeometry, xi: [f64; 2]) -> Result<PhysicalShape> {
    let family = geom.family;
    let s = shape_functions(family, xi);
    let href = shape_hessians(family, xi);
    let coords = geom.coords();

    // jac[i][j] = d x_i / d xi_j
    let mut jac = [[0.0; 2]; 2];
    // second derivatives of the map, per physical component
    let mut map_hess = [[0.0; 3]; 2];
    for (k, c) in coords.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                jac[i][j] += c[i] * s.grads[k][j];
            }
            for m in 0..3 {
                map_hess[i][m] += c[i] * href[k][m];
            }
        }
    }
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let scale = geom.diameter().powi(2).max(f64::MIN_POSITIVE);
    if !(det > 1e-12 * scale) {
        return Err(Error::DegenerateElement {
            element: geom.id,
            det,
        });
    }
    let inv = [
        [jac[1][1] / det, -jac[0][1] / det],
        [-jac[1][0] / det, jac[0][0] / det],
    ];

    let mut out = PhysicalShape {
        len: s.len,
        values: s.values,
        grads: [[0.0; 2]; MAX_NODES],
        hessians: [[0.0; 3]; MAX_NODES],
        det,
    };
    for k in 0..s.len {
        // grad_x = J^{-T} grad_xi
        let g = s.grads[k];
        let gx = [
            inv[0][0] * g[0] + inv[1][0] * g[1],
            inv[0][1] * g[0] + inv[1][1] * g[1],
        ];
        out.grads[k] = gx;

        // H_xi = J^T H_x J + sum_i (dN/dx_i) H_xi(x_i)  =>  solve for H_x
        let mut r = [
            [href[k][0], href[k][1]],
            [href[k][1], href[k][2]],
        ];
        for i in 0..2 {
            let mh = map_hess[i];
            r[0][0] -= gx[i] * mh[0];
            r[0][1] -= gx[i] * mh[1];
            r[1][0] -= gx[i] * mh[1];
            r[1][1] -= gx[i] * mh[2];
        }
        // H_x = J^{-T} r J^{-1}
        let mut hx = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        acc += inv[p][a] * r[p][q] * inv[q][b];
                    }
                }
                hx[a][b] = acc;
            }
        }
        out.hessians[k] = [hx[0][0], 0.5 * (hx[0][1] + hx[1][0]), hx[1][1]];
    }
    Ok(out)
}

/// Strain-displacement matrix with engineering shear strain.
///
/// Column `2k` is the x displacement of node `k`, column `2k + 1` its y
/// displacement.
pub fn b_matrix(geom: &ElementGeometry, xi: [f64; 2]) -> Result<Matrix3xX<f64>> {
    let ps = physical_shape(geom, xi)?;
    Ok(b_from_grads(&ps.grads[..ps.len]))
}

pub(crate) fn b_from_grads(grads: &[[f64; 2]]) -> Matrix3xX<f64> {
    let mut b = Matrix3xX::zeros(2 * grads.len());
    for (k, g) in grads.iter().enumerate() {
        b[(0, 2 * k)] = g[0];
        b[(1, 2 * k + 1)] = g[1];
        b[(2, 2 * k)] = g[1];
        b[(2, 2 * k + 1)] = g[0];
    }
    b
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementStiffness {
    pub family: ElementFamily,
    pub matrix: DMatrix<f64>,
}

/// Solid element stiffness `K_e = int B^T A B dA` with the family's default rule.
pub fn element_stiffness(geom: &ElementGeometry, material: &Material) -> Result<ElementStiffness> {
    if geom.family == ElementFamily::P1 {
        // constant B: area times the integrand
        let b = b_matrix(geom, [1.0 / 3.0, 1.0 / 3.0])?;
        let area = geom.signed_area();
        let matrix = b.transpose() * material.elasticity_matrix() * &b * area;
        return Ok(ElementStiffness {
            family: geom.family,
            matrix: symmetrize(matrix),
        });
    }
    element_stiffness_with_rule(geom, material, &QuadratureRule::stiffness_rule(geom.family))
}

pub fn element_stiffness_with_rule(
    geom: &ElementGeometry,
    material: &Material,
    rule: &QuadratureRule,
) -> Result<ElementStiffness> {
    let n = 2 * geom.family.nodes_per_element();
    let a = material.elasticity_matrix();
    let mut k = DMatrix::zeros(n, n);
    for (xi, w) in rule.points.iter().zip(&rule.weights) {
        let ps = physical_shape(geom, *xi)?;
        let b = b_from_grads(&ps.grads[..ps.len]);
        k += b.transpose() * a * &b * (w * ps.det * rule.reference_measure);
    }
    Ok(ElementStiffness {
        family: geom.family,
        matrix: symmetrize(k),
    })
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Elemental strain energy `u_e^T K_e u_e` (twice the stored energy).
pub fn strain_energy(geom: &ElementGeometry, material: &Material, u_e: &[f64]) -> Result<f64> {
    let n = 2 * geom.family.nodes_per_element();
    if u_e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: u_e.len(),
        });
    }
    let k = element_stiffness(geom, material)?;
    let u = DVector::from_column_slice(u_e);
    Ok((u.transpose() * &k.matrix * &u)[(0, 0)].max(0.0))
}
