//! SIMP compliance minimization with a sensitivity filter and
//! optimality-criteria updates.

mod filter;
mod oc;

use std::time::Instant;

pub use filter::{sensitivity_filter, SensitivityFilter};
pub use oc::oc_update;

use crate::error::{Error, Result};
use crate::fem::Material;
use crate::mesh::Mesh;
use crate::solver::{apply_dirichlet, Assembler, LinearSolver, LoadCase, SolverKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SimpConfig {
    pub volfrac: f64,
    pub penal: f64,
    /// Filter radius in units of the characteristic element size.
    pub rmin: f64,
    pub move_limit: f64,
    /// OC exponent.
    pub damping: f64,
    /// Stop once `rchange <= conv_tol`.
    pub conv_tol: f64,
    pub max_iters: usize,
    pub x_min: f64,
    pub solver: SolverKind,
}

impl Default for SimpConfig {
    fn default() -> Self {
        Self {
            volfrac: 0.5,
            penal: 3.0,
            rmin: 1.5,
            move_limit: 0.2,
            damping: 0.5,
            conv_tol: 0.01,
            max_iters: 1000,
            x_min: 1e-3,
            solver: SolverKind::Direct,
        }
    }
}

impl SimpConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.volfrac > 0.0 && self.volfrac < 1.0) {
            return bad(format!("volfrac must lie in (0, 1), got {}", self.volfrac));
        }
        if !(self.penal >= 1.0) {
            return bad(format!("penal must be at least 1, got {}", self.penal));
        }
        if !(self.rmin > 0.0) {
            return bad(format!("rmin must be positive, got {}", self.rmin));
        }
        if !(self.move_limit > 0.0) {
            return bad(format!("move must be positive, got {}", self.move_limit));
        }
        if !(self.damping > 0.0) {
            return bad(format!("damping must be positive, got {}", self.damping));
        }
        if !(self.conv_tol >= 0.0) {
            return bad(format!("conv_tol must be non-negative, got {}", self.conv_tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.x_min > 0.0 && self.x_min < self.volfrac) {
            return bad(format!("x_min must lie in (0, volfrac), got {}", self.x_min));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub x: Vec<f64>,
    pub passive: Vec<bool>,
    pub volumes: Vec<f64>,
}

impl DensityField {
    /// `x = volfrac` on active elements, `x_min` on passive ones.
    pub fn initial(mesh: &Mesh, volfrac: f64, x_min: f64) -> Self {
        let passive = mesh.passive_mask();
        Self {
            x: passive.iter().map(|&p| if p { x_min } else { volfrac }).collect(),
            passive,
            volumes: mesh.element_areas(),
        }
    }

    /// Uniform field over all elements, ignoring passivity.
    pub fn uniform(mesh: &Mesh, value: f64) -> Self {
        Self {
            x: vec![value; mesh.n_elements()],
            passive: vec![false; mesh.n_elements()],
            volumes: mesh.element_areas(),
        }
    }

    pub fn active_volume(&self) -> f64 {
        self.volumes.iter().zip(&self.passive).filter(|p| !*p.1).map(|p| p.0).sum()
    }

    /// `sum x_e v_e / sum v_e` over active elements.
    pub fn volume_fraction(&self) -> f64 {
        let num: f64 = self
            .x
            .iter()
            .zip(&self.volumes)
            .zip(&self.passive)
            .filter(|p| !*p.1)
            .map(|((x, v), _)| x * v)
            .sum();
        num / self.active_volume()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Compliance of the design entering the iteration.
    pub compliance: f64,
    pub rchange: f64,
    /// Active volume fraction after the update.
    pub volume: f64,
    /// Seconds spent in the iteration.
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub density: DensityField,
    pub history: Vec<IterationRecord>,
    pub compliance: f64,
    /// Displacement of the last solve.
    pub displacement: Vec<f64>,
}

impl OptimizationResult {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// `c = sum_e x_e^p u_e^T K0_e u_e` and `dc_e = -p x_e^(p-1) u_e^T K0_e u_e`.
pub fn compliance_and_sensitivity(assembler: &Assembler, x: &[f64], u: &[f64], penal: f64) -> (f64, Vec<f64>) {
    let energies = assembler.element_energies(u);
    let mut c = 0.0;
    let dc = energies
        .iter()
        .zip(x)
        .map(|(&w, &xe)| {
            let w = w.max(0.0);
            c += xe.powf(penal) * w;
            -penal * xe.powf(penal - 1.0) * w
        })
        .collect();
    (c, dc)
}

/// `max|x - x_old| / max(x_old)`.
pub fn rchange(x: &[f64], x_old: &[f64]) -> f64 {
    let diff = x.iter().zip(x_old).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    diff / x_old.iter().copied().fold(0.0, f64::max)
}

pub fn optimize(mesh: &Mesh, case: &LoadCase, material: &Material, config: &SimpConfig) -> Result<OptimizationResult> {
    optimize_with(mesh, case, material, config, |_, _| {})
}

/// Runs the loop, calling `observer` after every iteration with the record
/// and the updated densities.
pub fn optimize_with<F>(
    mesh: &Mesh,
    case: &LoadCase,
    material: &Material,
    config: &SimpConfig,
    mut observer: F,
) -> Result<OptimizationResult>
where
    F: FnMut(&IterationRecord, &DensityField),
{
    config.validate()?;
    let mut assembler = Assembler::new(mesh, material, case)?;
    assembler.x_min = config.x_min;
    let filter = SensitivityFilter::new(mesh, config.rmin);
    let mut solver = LinearSolver::new(config.solver);
    let mut field = DensityField::initial(mesh, config.volfrac, config.x_min);
    let mut history = Vec::new();
    let mut displacement: Vec<f64>;

    loop {
        let iteration = history.len() + 1;
        let start = Instant::now();
        let wrap = |source: Error| Error::Iteration {
            iteration,
            source: Box::new(source),
        };
        let system = assembler.assemble(&field.x, config.penal).map_err(wrap)?;
        let reduced = apply_dirichlet(&system).map_err(wrap)?;
        let solution = solver.solve(&reduced).map_err(wrap)?;
        let (compliance, dc) = compliance_and_sensitivity(&assembler, &field.x, &solution.u, config.penal);
        let dc = filter.apply(&field.x, &dc);
        let x_new = oc_update(&field.x, &dc, &field.volumes, &field.passive, config).map_err(wrap)?;
        let change = rchange(&x_new, &field.x);
        field.x = x_new;
        displacement = solution.u;

        let record = IterationRecord {
            iteration,
            compliance,
            rchange: change,
            volume: field.volume_fraction(),
            wall_time: start.elapsed().as_secs_f64(),
        };
        observer(&record, &field);
        history.push(record);
        if change <= config.conv_tol || iteration >= config.max_iters {
            break;
        }
    }
    let compliance = history.last().map_or(f64::NAN, |r| r.compliance);
    Ok(OptimizationResult {
        density: field,
        history,
        compliance,
        displacement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rchange_uses_max_old_denominator() {
        assert_eq!(rchange(&[0.5, 0.3], &[0.25, 0.5]), 0.5);
    }

    #[test]
    fn config_validation() {
        assert!(SimpConfig::default().validate().is_ok());
        for cfg in [
            SimpConfig { volfrac: 1.0, ..Default::default() },
            SimpConfig { penal: 0.5, ..Default::default() },
            SimpConfig { rmin: 0.0, ..Default::default() },
            SimpConfig { max_iters: 0, ..Default::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        }
    }
}
