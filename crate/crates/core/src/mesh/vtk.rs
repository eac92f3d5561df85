//! Legacy ASCII VTK export (`UNSTRUCTURED_GRID`) with optional cell data.

use std::io::{self, Write};

use super::Mesh;
use crate::fem::ElementFamily;

pub fn cell_type(family: ElementFamily) -> u8 {
    match family {
        ElementFamily::P1 => 5,
        ElementFamily::P2 => 22,
        ElementFamily::Q1 => 9,
    }
}

/// Writes the mesh and any number of named per-element scalar fields.
pub fn write_vtk<W: Write>(
    out: &mut W,
    mesh: &Mesh,
    title: &str,
    cell_data: &[(&str, &[f64])],
) -> io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.n_nodes())?;
    for n in &mesh.nodes {
        writeln!(out, "{} {} 0", n.x, n.y)?;
    }
    let size: usize = mesh.elements.iter().map(|e| e.nodes.len() + 1).sum();
    writeln!(out, "CELLS {} {}", mesh.n_elements(), size)?;
    for el in &mesh.elements {
        write!(out, "{}", el.nodes.len())?;
        for n in &el.nodes {
            write!(out, " {n}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.n_elements())?;
    let t = cell_type(mesh.family);
    for _ in &mesh.elements {
        writeln!(out, "{t}")?;
    }
    if !cell_data.is_empty() {
        writeln!(out, "CELL_DATA {}", mesh.n_elements())?;
        for (name, values) in cell_data {
            if values.len() != mesh.n_elements() {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidInput,
                    format!("cell field `{name}` has {} values for {} cells", values.len(), mesh.n_elements()),
                ));
            }
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in values.iter() {
                writeln!(out, "{v}")?;
            }
        }
    }
    Ok(())
}
