use std::collections::HashMap;

use super::{DomainShape, DomainSpec, Edge, EdgeKind, Element, Mesh, Node, Triangulation};
use crate::error::{Error, Result};
use crate::fem::ElementFamily;
use crate::solver::LoadCase;

/// Builds a structured mesh of the domain's bounding rectangle.
///
/// For trapezoids the full grid is generated; quads whose centroid falls
/// outside the trapezoid and triangles lying entirely outside it are marked
/// passive. Triangle meshes are refined `spec.refine_level` times; Q1 meshes
/// instead use a `2^level` times finer grid.
pub fn generate_mesh(spec: &DomainSpec, family: ElementFamily) -> Result<Mesh> {
    spec.validate()?;
    let mut mesh = match family {
        ElementFamily::Q1 => {
            let scale = 1usize << spec.refine_level;
            quad_grid(spec, spec.nx * scale, spec.ny * scale)
        }
        _ => {
            let mut mesh = triangle_grid(spec, family);
            for _ in 0..spec.refine_level {
                mesh = refine_uniform(&mesh)?;
            }
            mesh
        }
    };
    mesh.domain = *spec;
    mark_passive(&mut mesh);
    Ok(mesh)
}

fn grid_nodes(spec: &DomainSpec, nx: usize, ny: usize) -> Vec<[f64; 2]> {
    let (dx, dy) = (spec.width / nx as f64, spec.height / ny as f64);
    let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // pin the far boundary exactly
            let x = if i == nx { spec.width } else { i as f64 * dx };
            let y = if j == ny { spec.height } else { j as f64 * dy };
            coords.push([x, y]);
        }
    }
    coords
}

fn quad_grid(spec: &DomainSpec, nx: usize, ny: usize) -> Mesh {
    let coords = grid_nodes(spec, nx, ny);
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    assemble_topology(coords, cells, ElementFamily::Q1, *spec)
}

fn triangle_grid(spec: &DomainSpec, family: ElementFamily) -> Mesh {
    let (nx, ny) = (spec.nx, spec.ny);
    let mut coords = grid_nodes(spec, nx, ny);
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::new();
    match spec.triangulation {
        Triangulation::TwoSplit => {
            for j in 0..ny {
                for i in 0..nx {
                    let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                    tris.push(vec![a, b, c]);
                    tris.push(vec![a, c, d]);
                }
            }
        }
        Triangulation::CrossSplit => {
            let base = coords.len();
            for j in 0..ny {
                for i in 0..nx {
                    let (p, q) = (coords[id(i, j)], coords[id(i + 1, j + 1)]);
                    coords.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                }
            }
            for j in 0..ny {
                for i in 0..nx {
                    let c = base + j * nx + i;
                    let (a, b, cc, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                    tris.push(vec![a, b, c]);
                    tris.push(vec![b, cc, c]);
                    tris.push(vec![cc, d, c]);
                    tris.push(vec![d, a, c]);
                }
            }
        }
    }
    assemble_topology(coords, tris, family, *spec)
}

/// Builds nodes, elements and edges from vertex coordinates and vertex
/// connectivity. P2 midside nodes are appended after the vertices, one per
/// edge in edge-id order.
fn assemble_topology(
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
    family: ElementFamily,
    domain: DomainSpec,
) -> Mesh {
    let n_vertices = vertices.len();
    let mut nodes: Vec<Node> = vertices
        .iter()
        .enumerate()
        .map(|(id, &[x, y])| Node { id, x, y })
        .collect();

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut elements = Vec::with_capacity(cells.len());
    for (eid, verts) in cells.into_iter().enumerate() {
        let nv = verts.len();
        let mut local_edges = Vec::with_capacity(nv);
        for k in 0..nv {
            let (a, b) = (verts[k], verts[(k + 1) % nv]);
            let key = (a.min(b), a.max(b));
            let edge = *edge_index.entry(key).or_insert_with(|| {
                let (pa, pb) = (vertices[a], vertices[b]);
                edges.push(Edge {
                    id: edges.len(),
                    nodes: [a, b],
                    midside: None,
                    kind: EdgeKind::Neumann,
                    elements: Vec::with_capacity(2),
                    length: (pb[0] - pa[0]).hypot(pb[1] - pa[1]),
                });
                edges.len() - 1
            });
            edges[edge].elements.push(eid);
            local_edges.push(edge);
        }
        elements.push(Element {
            id: eid,
            family,
            nodes: verts,
            edges: local_edges,
            passive: false,
        });
    }

    for e in &mut edges {
        if e.elements.len() == 2 {
            e.kind = EdgeKind::Interior;
        }
    }

    if family == ElementFamily::P2 {
        for e in &mut edges {
            let (pa, pb) = (nodes[e.nodes[0]].coords(), nodes[e.nodes[1]].coords());
            let id = nodes.len();
            nodes.push(Node {
                id,
                x: 0.5 * (pa[0] + pb[0]),
                y: 0.5 * (pa[1] + pb[1]),
            });
            e.midside = Some(id);
        }
        for el in &mut elements {
            let mids: Vec<usize> = el.edges.iter().map(|&e| edges[e].midside.unwrap()).collect();
            el.nodes.extend(mids);
        }
    }

    Mesh {
        nodes,
        elements,
        edges,
        family,
        domain,
        n_vertices,
    }
}

fn mark_passive(mesh: &mut Mesh) {
    let spec = mesh.domain;
    if !matches!(spec.shape, DomainShape::Trapezoid { .. }) {
        return;
    }
    let tol = 1e-12 * spec.width.max(spec.height);
    for e in 0..mesh.n_elements() {
        let geom = mesh.geometry(e);
        let c = geom.centroid();
        let passive = match mesh.family {
            ElementFamily::Q1 => !spec.contains(c),
            _ => {
                // entirely on the outer side of the upper or the lower slant
                let above = |p: &[f64; 2]| p[1] >= spec.trapezoid_bounds(p[0]).1 - tol;
                let below = |p: &[f64; 2]| p[1] <= spec.trapezoid_bounds(p[0]).0 + tol;
                !spec.contains(c)
                    && (geom.vertices().iter().all(above) || geom.vertices().iter().all(below))
            }
        };
        mesh.elements[e].passive = passive;
    }
}

/// Red refinement: every triangle is split into four congruent children
/// through its edge midpoints.
///
/// Parent vertices keep their ids; the new vertex on parent edge `e` gets id
/// `n_vertices + e`. Children inherit the parent's passive flag. P2 midside
/// nodes are regenerated on the refined mesh.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    if !mesh.family.is_triangle() {
        return Err(Error::UnsupportedFamily {
            family: mesh.family.to_string(),
            what: "uniform refinement (regenerate the quad grid instead)",
        });
    }
    let nv = mesh.n_vertices;
    let mut vertices: Vec<[f64; 2]> = mesh.nodes[..nv].iter().map(|n| n.coords()).collect();
    for e in &mesh.edges {
        let (a, b) = (vertices[e.nodes[0]], vertices[e.nodes[1]]);
        vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
    }
    let mut cells = Vec::with_capacity(4 * mesh.n_elements());
    let mut passive = Vec::with_capacity(4 * mesh.n_elements());
    for el in &mesh.elements {
        let [a, b, c] = [el.nodes[0], el.nodes[1], el.nodes[2]];
        let [mab, mbc, mca] = [el.edges[0] + nv, el.edges[1] + nv, el.edges[2] + nv];
        cells.push(vec![a, mab, mca]);
        cells.push(vec![mab, b, mbc]);
        cells.push(vec![mca, mbc, c]);
        cells.push(vec![mab, mbc, mca]);
        passive.extend([el.passive; 4]);
    }
    let mut domain = mesh.domain;
    domain.refine_level += 1;
    let mut refined = assemble_topology(vertices, cells, mesh.family, domain);
    for (el, p) in refined.elements.iter_mut().zip(passive) {
        el.passive = p;
    }
    Ok(refined)
}

/// Labels boundary edges: Dirichlet when both endpoints are supported,
/// Neumann otherwise. Interior edges are left untouched.
pub fn classify_boundary(mut mesh: Mesh, case: &LoadCase) -> Result<Mesh> {
    let mut fixed = vec![false; mesh.n_nodes()];
    for n in case.dirichlet_nodes(&mesh)? {
        fixed[n] = true;
    }
    for e in mesh.edges.iter_mut().filter(|e| e.is_boundary()) {
        e.kind = if e.nodes.iter().all(|&n| fixed[n]) {
            EdgeKind::Dirichlet
        } else {
            EdgeKind::Neumann
        };
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q1_cantilever_count() {
        let m = generate_mesh(&DomainSpec::rectangle(32.0, 20.0, 32, 20), ElementFamily::Q1).unwrap();
        assert_eq!(m.n_elements(), 640);
        assert_eq!(m.n_nodes(), 33 * 21);
    }

    #[test]
    fn smallest_two_split() {
        let spec = DomainSpec::rectangle(1.0, 1.0, 1, 1).with_triangulation(Triangulation::TwoSplit);
        let m = generate_mesh(&spec, ElementFamily::P1).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.edges.len(), 5);
        assert_eq!(m.edges.iter().filter(|e| e.is_boundary()).count(), 4);
    }

    #[test]
    fn refine_counts() {
        let spec = DomainSpec::rectangle(1.0, 1.0, 1, 1).with_triangulation(Triangulation::TwoSplit);
        let m = generate_mesh(&spec, ElementFamily::P1).unwrap();
        assert_eq!(refine_uniform(&m).unwrap().n_elements(), 8);

        let m = generate_mesh(&DomainSpec::rectangle(32.0, 32.0, 32, 32), ElementFamily::P1).unwrap();
        assert_eq!(m.n_elements(), 4096);
        assert_eq!(refine_uniform(&m).unwrap().n_elements(), 16384);
    }

    #[test]
    fn refine_rejects_quads() {
        let m = generate_mesh(&DomainSpec::rectangle(1.0, 1.0, 2, 2), ElementFamily::Q1).unwrap();
        assert!(matches!(refine_uniform(&m), Err(Error::UnsupportedFamily { .. })));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate_mesh(&DomainSpec::rectangle(1.0, 1.0, 0, 3), ElementFamily::Q1).is_err());
        let bad = DomainSpec::trapezoid(4.0, 3.0, 3.5, 4, 3);
        assert!(matches!(generate_mesh(&bad, ElementFamily::P1), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn p2_midsides_at_edge_midpoints() {
        let m = generate_mesh(&DomainSpec::rectangle(3.0, 2.0, 3, 2), ElementFamily::P2).unwrap();
        for el in &m.elements {
            for k in 0..3 {
                let a = m.nodes[el.nodes[k]].coords();
                let b = m.nodes[el.nodes[(k + 1) % 3]].coords();
                let mid = m.nodes[el.nodes[3 + k]].coords();
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                let err = (mid[0] - 0.5 * (a[0] + b[0])).hypot(mid[1] - 0.5 * (a[1] + b[1]));
                assert!(err <= 1e-12 * len);
            }
        }
    }
}
