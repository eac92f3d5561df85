#![allow(dead_code)]

use topopt::fem::{b_matrix, ElementFamily, ElementGeometry, Material};
use topopt::mesh::Mesh;
use topopt::solver::{apply_dirichlet, Assembler, LinearSolver, LoadCase, SolverKind};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Reference-element quadrature oracle: tensor Gauss on the square, or a
/// collapsed (Duffy) tensor rule on the triangle. Weights include the
/// reference measure.
pub fn oracle_rule(family: ElementFamily, n: usize) -> Vec<([f64; 2], f64)> {
    let g = gauss_legendre(n);
    let mut out = Vec::new();
    for &(a, wa) in &g {
        for &(b, wb) in &g {
            if family.is_triangle() {
                let u = 0.5 * (a + 1.0);
                let v = 0.5 * (b + 1.0) * (1.0 - u);
                out.push(([u, v], 0.25 * wa * wb * (1.0 - u)));
            } else {
                out.push(([a, b], wa * wb));
            }
        }
    }
    out
}

/// Element stiffness by the oracle rule.
pub fn oracle_stiffness(geom: &ElementGeometry, material: &Material, n: usize) -> nalgebra::DMatrix<f64> {
    let a = material.elasticity_matrix();
    let nd = 2 * geom.family.nodes_per_element();
    let mut k = nalgebra::DMatrix::zeros(nd, nd);
    for (xi, w) in oracle_rule(geom.family, n) {
        let ps = topopt::fem::physical_shape(geom, xi).unwrap();
        let b = b_matrix(geom, xi).unwrap();
        k += b.transpose() * a * &b * (w * ps.det);
    }
    k
}

pub fn rigid_modes(coords: &[[f64; 2]]) -> [Vec<f64>; 3] {
    let tx = coords.iter().flat_map(|_| [1.0, 0.0]).collect();
    let ty = coords.iter().flat_map(|_| [0.0, 1.0]).collect();
    let rot = coords.iter().flat_map(|c| [-c[1], c[0]]).collect();
    [tx, ty, rot]
}

/// Compliance of a full solve at densities `x`.
pub fn compliance(mesh: &Mesh, case: &LoadCase, material: &Material, x: &[f64], penal: f64) -> f64 {
    let assembler = Assembler::new(mesh, material, case).unwrap();
    let system = assembler.assemble(x, penal).unwrap();
    LinearSolver::new(SolverKind::Direct)
        .solve(&apply_dirichlet(&system).unwrap())
        .unwrap()
        .compliance
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Moves interior vertices by a deterministic pseudo-random offset of up to
/// `amount` cell sizes and recenters P2 midside nodes on their edges.
pub fn perturb(mesh: &mut Mesh, amount: f64) {
    let h = mesh.characteristic_size();
    let boundary: std::collections::HashSet<usize> = mesh.boundary_nodes().into_iter().collect();
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for id in 0..mesh.n_vertices {
        let (dx, dy) = (next(), next());
        if !boundary.contains(&id) {
            mesh.nodes[id].x += amount * h * dx;
            mesh.nodes[id].y += amount * h * dy;
        }
    }
    for e in 0..mesh.edges.len() {
        if let Some(m) = mesh.edges[e].midside {
            let [a, b] = mesh.edges[e].nodes;
            mesh.nodes[m].x = 0.5 * (mesh.nodes[a].x + mesh.nodes[b].x);
            mesh.nodes[m].y = 0.5 * (mesh.nodes[a].y + mesh.nodes[b].y);
        }
    }
}

/// Prescribes `field` on every boundary node, solves with the given body
/// force and returns the largest nodal deviation from `field`.
pub fn patch_error(
    mesh: &Mesh,
    material: &Material,
    kind: SolverKind,
    body_force: [f64; 2],
    field: impl Fn([f64; 2]) -> [f64; 2],
) -> f64 {
    let case = LoadCase {
        body_force,
        ..LoadCase::default()
    };
    let assembler = Assembler::new(mesh, material, &case).unwrap();
    let mut system = assembler.assemble(&vec![1.0; mesh.n_elements()], 3.0).unwrap();
    for n in mesh.boundary_nodes() {
        let v = field(mesh.nodes[n].coords());
        system.prescribe(2 * n, v[0]);
        system.prescribe(2 * n + 1, v[1]);
    }
    let u = LinearSolver::new(kind).solve(&apply_dirichlet(&system).unwrap()).unwrap().u;
    mesh.nodes
        .iter()
        .map(|n| {
            let v = field(n.coords());
            (u[2 * n.id] - v[0]).abs().max((u[2 * n.id + 1] - v[1]).abs())
        })
        .fold(0.0, f64::max)
}

pub fn linear_field(p: [f64; 2]) -> [f64; 2] {
    [0.1 + 0.02 * p[0] - 0.03 * p[1], -0.05 + 0.015 * p[0] + 0.04 * p[1]]
}

pub fn quadratic_field(p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    [0.01 * x * x + 0.02 * x * y - 0.005 * y * y + 0.1 * x, -0.01 * x * x + 0.03 * x * y + 0.02 * y * y - 0.2]
}

/// Body force balancing `quadratic_field`: `f = -div sigma`.
pub fn quadratic_body_force(m: &Material) -> [f64; 2] {
    let (l, mu) = (m.lambda, m.mu);
    // second derivatives of u_x: (0.02, 0.02, -0.01), of u_y: (-0.02, 0.03, 0.04)
    let (axx, axy, ayy) = (0.02, 0.02, -0.01);
    let (bxx, bxy, byy) = (-0.02, 0.03, 0.04);
    let div_x = (l + 2.0 * mu) * axx + mu * ayy + (l + mu) * bxy;
    let div_y = (l + 2.0 * mu) * byy + mu * bxx + (l + mu) * axy;
    [-div_x, -div_y]
}
