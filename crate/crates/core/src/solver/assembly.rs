use nalgebra::{DMatrix, SymmetricEigen};

use super::{CscMatrix, DofMap, LoadCase};
use crate::error::{Error, Result};
use crate::fem::{element_stiffness, physical_shape, quadrature, ElementFamily, Material, QuadratureRule};
use crate::mesh::{EdgeKind, Mesh};

/// Precomputed solid element matrices, dof maps, the global sparsity pattern
/// and the load vector for one mesh, material and load case.
#[derive(Debug, Clone)]
pub struct Assembler {
    n_dofs: usize,
    element_dofs: Vec<Vec<usize>>,
    solid: Vec<DMatrix<f64>>,
    pattern: CscMatrix,
    /// For every element, the value slot of local entry `(i, j)` at `i * n + j`.
    scatter: Vec<Vec<usize>>,
    load: Vec<f64>,
    dirichlet: Vec<usize>,
    coords: Vec<[f64; 2]>,
    pub x_min: f64,
}

/// `K U = F` before constraint elimination.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: CscMatrix,
    pub f: Vec<f64>,
    /// Constrained dofs and their prescribed values, sorted by dof.
    pub dirichlet: Vec<(usize, f64)>,
    /// Node coordinates, used to check that supports remove rigid motions.
    pub coords: Vec<[f64; 2]>,
}

impl GlobalSystem {
    /// Adds or overrides a prescribed displacement.
    pub fn prescribe(&mut self, dof: usize, value: f64) {
        match self.dirichlet.binary_search_by_key(&dof, |&(d, _)| d) {
            Ok(i) => self.dirichlet[i].1 = value,
            Err(i) => self.dirichlet.insert(i, (dof, value)),
        }
    }
}

/// The free-free block after eliminating constrained dofs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub k: CscMatrix,
    pub f: Vec<f64>,
    pub free: Vec<usize>,
    pub dirichlet: Vec<(usize, f64)>,
    pub f_full: Vec<f64>,
}

impl ReducedSystem {
    pub fn n_dofs(&self) -> usize {
        self.f_full.len()
    }

    /// Full displacement vector from the free-dof solution.
    pub fn expand(&self, u_free: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n_dofs()];
        for (&d, &v) in self.free.iter().zip(u_free) {
            u[d] = v;
        }
        for &(d, v) in &self.dirichlet {
            u[d] = v;
        }
        u
    }
}

impl Assembler {
    pub fn new(mesh: &Mesh, material: &Material, case: &LoadCase) -> Result<Self> {
        let dofs = DofMap::new(mesh);
        let n_dofs = dofs.n_dofs();
        let element_dofs: Vec<Vec<usize>> =
            mesh.elements.iter().map(|el| dofs.element_dofs(&el.nodes)).collect();
        let solid = (0..mesh.n_elements())
            .map(|e| element_stiffness(&mesh.geometry(e), material).map(|k| k.matrix))
            .collect::<Result<Vec<_>>>()?;

        let pattern = CscMatrix::from_pattern(
            n_dofs,
            n_dofs,
            element_dofs
                .iter()
                .flat_map(|d| d.iter().flat_map(move |&r| d.iter().map(move |&c| (r, c)))),
        );
        let scatter = element_dofs
            .iter()
            .map(|d| {
                let mut s = Vec::with_capacity(d.len() * d.len());
                for &r in d {
                    for &c in d {
                        s.push(pattern.position(r, c).expect("entry in pattern"));
                    }
                }
                s
            })
            .collect();

        let load = load_vector(mesh, case)?;
        let dirichlet = case
            .dirichlet_nodes(mesh)?
            .into_iter()
            .flat_map(|n| dofs.dofs(n))
            .collect();
        Ok(Self {
            n_dofs,
            element_dofs,
            solid,
            pattern,
            scatter,
            load,
            dirichlet,
            coords: mesh.nodes.iter().map(|n| n.coords()).collect(),
            x_min: 1e-3,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_elements(&self) -> usize {
        self.solid.len()
    }

    /// Solid stiffness `K_0,e` of an element.
    pub fn solid_stiffness(&self, element: usize) -> &DMatrix<f64> {
        &self.solid[element]
    }

    pub fn element_dofs(&self, element: usize) -> &[usize] {
        &self.element_dofs[element]
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    /// `u_e^T K_0,e u_e` for every element.
    pub fn element_energies(&self, u: &[f64]) -> Vec<f64> {
        self.solid
            .iter()
            .zip(&self.element_dofs)
            .map(|(k, dofs)| {
                let n = dofs.len();
                let mut acc = 0.0;
                for i in 0..n {
                    let ui = u[dofs[i]];
                    let mut row = 0.0;
                    for j in 0..n {
                        row += k[(i, j)] * u[dofs[j]];
                    }
                    acc += ui * row;
                }
                acc
            })
            .collect()
    }

    /// `K = sum_e x_e^p P_e^T K_0,e P_e`, accumulated in element order.
    pub fn assemble(&self, densities: &[f64], penal: f64) -> Result<GlobalSystem> {
        if densities.len() != self.n_elements() {
            return Err(Error::DimensionMismatch {
                expected: self.n_elements(),
                actual: densities.len(),
            });
        }
        let tol = 1e-12;
        for (element, &value) in densities.iter().enumerate() {
            if !(value >= self.x_min - tol && value <= 1.0 + tol) {
                return Err(Error::DensityOutOfRange {
                    element,
                    value,
                    min: self.x_min,
                });
            }
        }
        let mut k = self.pattern.clone();
        for ((ke, slots), &x) in self.solid.iter().zip(&self.scatter).zip(densities) {
            let scale = x.powf(penal);
            let n = ke.nrows();
            for i in 0..n {
                for j in 0..n {
                    k.values[slots[i * n + j]] += scale * ke[(i, j)];
                }
            }
        }
        Ok(GlobalSystem {
            k,
            f: self.load.clone(),
            dirichlet: self.dirichlet.iter().map(|&d| (d, 0.0)).collect(),
            coords: self.coords.clone(),
        })
    }
}

/// One-shot assembly; see [`Assembler`] for repeated use on one mesh.
pub fn assemble(
    mesh: &Mesh,
    densities: &[f64],
    penal: f64,
    material: &Material,
    case: &LoadCase,
) -> Result<GlobalSystem> {
    Assembler::new(mesh, material, case)?.assemble(densities, penal)
}

/// Point loads plus consistent body-force and traction contributions.
pub fn load_vector(mesh: &Mesh, case: &LoadCase) -> Result<Vec<f64>> {
    let dofs = DofMap::new(mesh);
    let mut f = vec![0.0; dofs.n_dofs()];
    for load in &case.point_loads {
        for n in load.at.resolve(mesh)? {
            let [dx, dy] = dofs.dofs(n);
            f[dx] += load.force[0];
            f[dy] += load.force[1];
        }
    }

    let body = case.body_force;
    if body != [0.0, 0.0] {
        let rule = match mesh.family {
            ElementFamily::Q1 => QuadratureRule::square_gauss(3),
            _ => QuadratureRule::triangle_7(),
        };
        for (e, el) in mesh.elements.iter().enumerate() {
            let geom = mesh.geometry(e);
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let ps = physical_shape(&geom, *xi)?;
                let jw = w * ps.det * rule.reference_measure;
                for (k, &n) in el.nodes.iter().enumerate() {
                    f[2 * n] += jw * ps.values[k] * body[0];
                    f[2 * n + 1] += jw * ps.values[k] * body[1];
                }
            }
        }
    }

    if !case.tractions.is_empty() {
        for edge in mesh.edges.iter().filter(|e| e.kind != EdgeKind::Interior) {
            let g = case.traction_on(mesh, edge);
            if g == [0.0, 0.0] {
                continue;
            }
            let mut nodes = vec![edge.nodes[0], edge.nodes[1]];
            nodes.extend(edge.midside);
            for (t, w) in quadrature::edge_rule() {
                let phi = edge_trace(mesh.family, t);
                for (k, &n) in nodes.iter().enumerate() {
                    f[2 * n] += w * edge.length * phi[k] * g[0];
                    f[2 * n + 1] += w * edge.length * phi[k] * g[1];
                }
            }
        }
    }
    Ok(f)
}

/// 1D trace basis along an edge: endpoints, then (P2) the midside node.
pub(crate) fn edge_trace(family: ElementFamily, t: f64) -> Vec<f64> {
    match family {
        ElementFamily::P2 => vec![(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
        _ => vec![1.0 - t, t],
    }
}

/// Fails when the constrained dofs leave a rigid-body motion free.
fn check_rigid_modes(system: &GlobalSystem) -> Result<()> {
    let n = system.coords.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for p in &system.coords {
        cx += p[0];
        cy += p[1];
    }
    cx /= n.max(1) as f64;
    cy /= n.max(1) as f64;
    let size = system
        .coords
        .iter()
        .map(|p| (p[0] - cx).hypot(p[1] - cy))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    // Gram matrix of the three rigid modes restricted to constrained dofs
    let mut gram = nalgebra::Matrix3::<f64>::zeros();
    for &(d, _) in &system.dirichlet {
        let p = system.coords[d / 2];
        let r = if d % 2 == 0 {
            [1.0, 0.0, -(p[1] - cy) / size]
        } else {
            [0.0, 1.0, (p[0] - cx) / size]
        };
        for i in 0..3 {
            for j in 0..3 {
                gram[(i, j)] += r[i] * r[j];
            }
        }
    }
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if !(hi > 0.0 && lo > 1e-10 * hi) {
        return Err(Error::Singular(format!(
            "{} constrained dofs do not suppress all rigid-body modes",
            system.dirichlet.len()
        )));
    }
    Ok(())
}

/// Eliminates constrained rows and columns; prescribed values move to the
/// right-hand side.
pub fn apply_dirichlet(system: &GlobalSystem) -> Result<ReducedSystem> {
    let n = system.f.len();
    if system.dirichlet.len() >= n {
        return Err(Error::Singular("every degree of freedom is constrained".into()));
    }
    check_rigid_modes(system)?;

    let mut map = vec![usize::MAX; n];
    let mut constrained = vec![false; n];
    for &(d, _) in &system.dirichlet {
        constrained[d] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&d| !constrained[d]).collect();
    for (i, &d) in free.iter().enumerate() {
        map[d] = i;
    }

    let k = &system.k;
    let mut f: Vec<f64> = free.iter().map(|&d| system.f[d]).collect();
    for &(c, value) in &system.dirichlet {
        if value == 0.0 {
            continue;
        }
        for p in k.col_ptr[c]..k.col_ptr[c + 1] {
            let r = map[k.row_idx[p]];
            if r != usize::MAX {
                f[r] -= k.values[p] * value;
            }
        }
    }

    let mut col_ptr = Vec::with_capacity(free.len() + 1);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    col_ptr.push(0);
    for &c in &free {
        for p in k.col_ptr[c]..k.col_ptr[c + 1] {
            let r = map[k.row_idx[p]];
            if r != usize::MAX {
                row_idx.push(r);
                values.push(k.values[p]);
            }
        }
        col_ptr.push(row_idx.len());
    }
    Ok(ReducedSystem {
        k: CscMatrix {
            nrows: free.len(),
            ncols: free.len(),
            col_ptr,
            row_idx,
            values,
        },
        f,
        free,
        dirichlet: system.dirichlet.clone(),
        f_full: system.f.clone(),
    })
}
