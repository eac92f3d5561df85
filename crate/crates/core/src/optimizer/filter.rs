use std::collections::HashMap;

use rayon::prelude::*;

use crate::mesh::Mesh;

/// Sensitivity filter with neighborhoods precomputed over element centroids.
///
/// `dc_e <- sum_i H_ei x_i dc_i / (x_e sum_i H_ei)` with
/// `H_ei = max(0, r - |c_e - c_i|)` and `r = rmin * h_ref`.
#[derive(Debug, Clone)]
pub struct SensitivityFilter {
    radius: f64,
    /// For every element, `(neighbor, H_ei)` sorted by neighbor id.
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl SensitivityFilter {
    /// `rmin` is measured in units of the mesh's characteristic element size.
    pub fn new(mesh: &Mesh, rmin: f64) -> Self {
        Self::from_centroids(&mesh.centroids(), rmin * mesh.characteristic_size())
    }

    /// Filter over arbitrary points with an absolute radius.
    pub fn from_centroids(centroids: &[[f64; 2]], radius: f64) -> Self {
        let cell = radius.max(f64::MIN_POSITIVE);
        let key = |p: &[f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, c) in centroids.iter().enumerate() {
            grid.entry(key(c)).or_default().push(i);
        }
        let neighbors = centroids
            .par_iter()
            .enumerate()
            .map(|(e, c)| {
                let (kx, ky) = key(c);
                let mut out = Vec::new();
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        let Some(bucket) = grid.get(&(kx + dx, ky + dy)) else {
                            continue;
                        };
                        for &i in bucket {
                            let o = &centroids[i];
                            let w = radius - (c[0] - o[0]).hypot(c[1] - o[1]);
                            if w > 0.0 {
                                out.push((i, w));
                            }
                        }
                    }
                }
                if out.is_empty() {
                    // radius below any distance: self only
                    out.push((e, 1.0));
                }
                out.sort_unstable_by_key(|p| p.0);
                out
            })
            .collect();
        Self { radius, neighbors }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn neighbors(&self, element: usize) -> &[(usize, f64)] {
        &self.neighbors[element]
    }

    pub fn apply(&self, x: &[f64], dc: &[f64]) -> Vec<f64> {
        self.neighbors
            .par_iter()
            .enumerate()
            .map(|(e, nb)| {
                let mut num = 0.0;
                let mut den = 0.0;
                for &(i, w) in nb {
                    num += w * x[i] * dc[i];
                    den += w;
                }
                num / (x[e] * den)
            })
            .collect()
    }
}

/// One-shot filter; rebuilds the neighborhoods on every call.
pub fn sensitivity_filter(mesh: &Mesh, x: &[f64], dc: &[f64], rmin: f64) -> Vec<f64> {
    SensitivityFilter::new(mesh, rmin).apply(x, dc)
}
