//! Density rasters and CSV/VTK exporters.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::ErrorBreakdown;
use crate::mesh::{vtk, Mesh};
use crate::optimizer::IterationRecord;

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

/// Maps points to the element containing them, using element vertices.
pub struct ElementLocator<'a> {
    mesh: &'a Mesh,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> ElementLocator<'a> {
    pub fn new(mesh: &'a Mesh) -> Self {
        let cell = mesh.characteristic_size().max(f64::MIN_POSITIVE);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for e in 0..mesh.n_elements() {
            let geom = mesh.geometry(e);
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for v in geom.vertices() {
                for d in 0..2 {
                    lo[d] = lo[d].min(v[d]);
                    hi[d] = hi[d].max(v[d]);
                }
            }
            let k = |v: f64| (v / cell).floor() as i64;
            for i in k(lo[0])..=k(hi[0]) {
                for j in k(lo[1])..=k(hi[1]) {
                    buckets.entry((i, j)).or_default().push(e);
                }
            }
        }
        Self { mesh, cell, buckets }
    }

    /// Smallest id of an element containing `p`.
    pub fn locate(&self, p: [f64; 2]) -> Option<usize> {
        let key = ((p[0] / self.cell).floor() as i64, (p[1] / self.cell).floor() as i64);
        self.buckets
            .get(&key)?
            .iter()
            .copied()
            .find(|&e| contains(self.mesh.geometry(e).vertices(), p))
    }
}

fn in_triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2], p: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], u: [f64; 2], v: [f64; 2]| (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0]);
    let area = cross(a, b, c);
    let tol = -1e-12 * area.abs();
    let s = [cross(a, b, p), cross(b, c, p), cross(c, a, p)];
    s.iter().all(|&v| v * area.signum() >= tol)
}

fn contains(vertices: &[[f64; 2]], p: [f64; 2]) -> bool {
    match vertices {
        [a, b, c] => in_triangle(*a, *b, *c, p),
        [a, b, c, d] => in_triangle(*a, *b, *c, p) || in_triangle(*a, *c, *d, p),
        _ => false,
    }
}

/// Grayscale raster of a density field; row 0 is the top of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Binary PGM (`P5`).
    pub fn write_pgm<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }
}

pub fn density_to_gray(x: f64) -> u8 {
    (255.0 * (1.0 - x.clamp(0.0, 1.0))).round() as u8
}

/// Samples the density at pixel centers; pixels outside every element are
/// white.
pub fn rasterize(mesh: &Mesh, x: &[f64], pixels_per_unit: f64) -> Result<Raster> {
    if x.len() != mesh.n_elements() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_elements(),
            actual: x.len(),
        });
    }
    if !(pixels_per_unit > 0.0) {
        return Err(Error::Config(format!("ppu must be positive, got {pixels_per_unit}")));
    }
    let d = &mesh.domain;
    let width = ((d.width * pixels_per_unit).round() as usize).max(1);
    let height = ((d.height * pixels_per_unit).round() as usize).max(1);
    let (sx, sy) = (d.width / width as f64, d.height / height as f64);
    let locator = ElementLocator::new(mesh);
    let mut pixels = Vec::with_capacity(width * height);
    for row in 0..height {
        let y = d.height - (row as f64 + 0.5) * sy;
        for col in 0..width {
            let p = [(col as f64 + 0.5) * sx, y];
            pixels.push(locator.locate(p).map_or(255, |e| density_to_gray(x[e])));
        }
    }
    Ok(Raster { width, height, pixels })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_pgm(path: &Path, raster: &Raster) -> Result<()> {
    let mut f = create(path)?;
    raster.write_pgm(&mut f).and_then(|_| f.flush()).map_err(|e| Error::io(path, e))
}

/// `element_id,centroid_x,centroid_y,density`.
pub fn write_density_csv(path: &Path, mesh: &Mesh, x: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["element_id", "centroid_x", "centroid_y", "density"])
        .map_err(|e| csv_err(path, e))?;
    for (e, c) in mesh.centroids().iter().enumerate() {
        w.write_record([e.to_string(), c[0].to_string(), c[1].to_string(), x[e].to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_density_vtk(path: &Path, mesh: &Mesh, x: &[f64]) -> Result<()> {
    let mut f = create(path)?;
    vtk::write_vtk(&mut f, mesh, "density", &[("density", x)])
        .and_then(|_| f.flush())
        .map_err(|e| Error::io(path, e))
}

/// `iteration,compliance,rchange,volume`.
pub fn write_history_csv(path: &Path, history: &[IterationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["iteration", "compliance", "rchange", "volume"])
        .map_err(|e| csv_err(path, e))?;
    for r in history {
        w.write_record([
            r.iteration.to_string(),
            r.compliance.to_string(),
            r.rchange.to_string(),
            r.volume.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-element indicators followed by a `total` row and an `eta` row
/// holding the global estimator in the last column.
pub fn write_error_csv(path: &Path, breakdown: &ErrorBreakdown) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["element_id", "h_K", "bulk", "jump_half_sum", "neumann", "eta_sq"])
        .map_err(|e| csv_err(path, e))?;
    for l in &breakdown.local {
        w.write_record([
            l.element.to_string(),
            l.h.to_string(),
            l.bulk.to_string(),
            l.jump_half_sum.to_string(),
            l.neumann.to_string(),
            l.eta_sq.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.write_record([
        "total".to_string(),
        String::new(),
        breakdown.bulk_total.to_string(),
        breakdown.jump_total.to_string(),
        breakdown.neumann_total.to_string(),
        breakdown.local_sum().to_string(),
    ])
    .map_err(|e| csv_err(path, e))?;
    let mut eta = vec![String::new(); 6];
    eta[0] = "eta".into();
    eta[5] = breakdown.eta_global.to_string();
    w.write_record(&eta).map_err(|e| csv_err(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Appends one row, writing the header for a new or empty file. An existing
/// header must match `header` exactly.
pub fn append_csv_row(path: &Path, header: &[&str], row: &[String]) -> Result<()> {
    let existing = match std::fs::metadata(path) {
        Ok(m) => m.len() > 0,
        Err(_) => false,
    };
    if existing {
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
        let found = r.headers().map_err(|e| csv_err(path, e))?;
        if found.iter().ne(header.iter().copied()) {
            return Err(Error::Schema {
                path: path.to_path_buf(),
                message: format!(
                    "header [{}] does not match expected [{}]",
                    found.iter().collect::<Vec<_>>().join(","),
                    header.join(",")
                ),
            });
        }
    }
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    if !existing {
        w.write_record(header).map_err(|e| csv_err(path, e))?;
    }
    w.write_record(row).map_err(|e| csv_err(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}
