//! Benchmark presets, run orchestration and file outputs.

mod config;
pub mod export;
mod preset;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

pub use config::{parse_pairs, parse_sweep, RunConfig};
pub use preset::{BenchmarkPreset, Problem, UNIT_LOAD};

use crate::error::{Error, Result};
use crate::estimator::{ErrorBreakdown, Estimator};
use crate::fem::{ElementFamily, Material};
use crate::mesh::{generate_mesh, Mesh};
use crate::optimizer::{optimize_with, DensityField, IterationRecord, SimpConfig};
use crate::solver::{apply_dirichlet, Assembler, LinearSolver, LoadCase};

/// Column layout of `report.csv`.
pub const REPORT_HEADER: [&str; 17] = [
    "problem",
    "element_type",
    "n_elements",
    "nx",
    "ny",
    "triangulation",
    "refine",
    "volfrac",
    "penal",
    "rmin",
    "final_objective",
    "iterations",
    "bulk_residual",
    "jump_residual",
    "neumann_residual",
    "local_eta_sq",
    "global_eta",
];

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub family: ElementFamily,
    pub n_elements: usize,
    pub compliance: f64,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub density: DensityField,
    pub error: Option<ErrorBreakdown>,
    pub files: Vec<PathBuf>,
    /// Seconds; not written to any CSV.
    pub wall_time: f64,
}

impl RunReport {
    pub fn row(&self) -> Vec<String> {
        let (nx, ny) = self.config.grid();
        let s = self.config.simp_config();
        let mut row = vec![
            self.config.problem.to_string(),
            self.family.to_string(),
            self.n_elements.to_string(),
            nx.to_string(),
            ny.to_string(),
            if self.family.is_triangle() {
                self.config.triangulation.to_string()
            } else {
                String::new()
            },
            self.config.refine.to_string(),
            s.volfrac.to_string(),
            s.penal.to_string(),
            s.rmin.to_string(),
            self.compliance.to_string(),
            self.iterations.to_string(),
        ];
        match &self.error {
            Some(e) => row.extend([
                e.bulk_total.to_string(),
                e.jump_total.to_string(),
                e.neumann_total.to_string(),
                e.local_sum().to_string(),
                e.eta_global.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        row
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {} elements={} compliance={:.6} iterations={}",
            self.config.problem, self.family, self.n_elements, self.compliance, self.iterations
        );
        if let Some(e) = &self.error {
            s += &format!(
                " bulk={:.6e} jump={:.6e} neumann={:.6e} eta={:.6e}",
                e.bulk_total, e.jump_total, e.neumann_total, e.eta_global
            );
        }
        s
    }
}

pub fn material_of(config: &RunConfig) -> Result<Material> {
    Material::new(config.youngs, config.poisson, config.material)
}

/// Mesh and load case of a configuration.
pub fn build(config: &RunConfig) -> Result<(Mesh, BenchmarkPreset)> {
    let preset = config.preset();
    let mesh = generate_mesh(&preset.domain, config.family)?;
    Ok((mesh, preset))
}

/// Error estimate on the solid design: active elements at density 1,
/// passive ones at `x_min`, stresses scaled by `x^p`.
pub fn estimate_solid(mesh: &Mesh, case: &LoadCase, material: &Material, simp: &SimpConfig) -> Result<ErrorBreakdown> {
    let x: Vec<f64> = mesh
        .elements
        .iter()
        .map(|e| if e.passive { simp.x_min } else { 1.0 })
        .collect();
    estimate_density(mesh, case, material, simp, &x)
}

/// Error estimate of the SIMP model at densities `x`.
pub fn estimate_density(
    mesh: &Mesh,
    case: &LoadCase,
    material: &Material,
    simp: &SimpConfig,
    x: &[f64],
) -> Result<ErrorBreakdown> {
    let mut assembler = Assembler::new(mesh, material, case)?;
    assembler.x_min = simp.x_min;
    let system = assembler.assemble(x, simp.penal)?;
    let solution = LinearSolver::new(simp.solver).solve(&apply_dirichlet(&system)?)?;
    let mut estimator = Estimator::new(mesh, &solution.u, material)?;
    if x.iter().any(|&v| v != 1.0) {
        estimator = estimator.with_stiffness_scale(x.iter().map(|v| v.powf(simp.penal)).collect())?;
    }
    estimator.estimate(case)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs one configuration and writes its outputs if `config.out` is set.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let (mesh, preset) = build(config)?;
    let material = material_of(config)?;
    let simp = config.simp_config();

    let snapshot_dir = match (&config.out, config.snapshots) {
        (Some(out), true) => {
            let d = out.join("snapshots");
            ensure_dir(&d)?;
            Some(d)
        }
        _ => None,
    };
    let mut snapshot_error = None;
    let mut files = Vec::new();
    let result = optimize_with(&mesh, &preset.case, &material, &simp, |record, field| {
        let Some(dir) = &snapshot_dir else { return };
        if snapshot_error.is_some() {
            return;
        }
        let path = dir.join(format!("density_{:04}.pgm", record.iteration));
        let written = export::rasterize(&mesh, &field.x, config.pixels_per_unit).and_then(|r| export::write_pgm(&path, &r));
        match written {
            Ok(()) => files.push(path),
            Err(e) => snapshot_error = Some(e),
        }
    })?;
    if let Some(e) = snapshot_error {
        return Err(e);
    }

    let error = if config.estimate_error {
        Some(if config.estimate_on_design {
            estimate_density(&mesh, &preset.case, &material, &simp, &result.density.x)?
        } else {
            estimate_solid(&mesh, &preset.case, &material, &simp)?
        })
    } else {
        None
    };

    let mut report = RunReport {
        config: config.clone(),
        family: config.family,
        n_elements: mesh.n_elements(),
        compliance: result.compliance,
        iterations: result.iterations(),
        history: result.history,
        density: result.density,
        error,
        files,
        wall_time: 0.0,
    };
    if let Some(out) = &config.out {
        write_outputs(out, &mesh, &mut report)?;
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

fn write_outputs(out: &Path, mesh: &Mesh, report: &mut RunReport) -> Result<()> {
    ensure_dir(out)?;
    let x = &report.density.x;
    let raster = export::rasterize(mesh, x, report.config.pixels_per_unit)?;
    let mut written = Vec::new();

    let p = out.join("density.pgm");
    export::write_pgm(&p, &raster)?;
    written.push(p);
    let p = out.join("density.csv");
    export::write_density_csv(&p, mesh, x)?;
    written.push(p);
    let p = out.join("density.vtk");
    export::write_density_vtk(&p, mesh, x)?;
    written.push(p);
    let p = out.join("history.csv");
    export::write_history_csv(&p, &report.history)?;
    written.push(p);
    if let Some(e) = &report.error {
        let p = out.join("error.csv");
        export::write_error_csv(&p, e)?;
        written.push(p);
    }
    let p = out.join("config.txt");
    std::fs::write(&p, report.config.to_text()).map_err(|e| Error::io(&p, e))?;
    written.push(p);
    let p = out.join("report.csv");
    export::append_csv_row(&p, &REPORT_HEADER, &report.row())?;
    written.push(p);

    report.files.extend(written);
    Ok(())
}

/// Runs every configuration in parallel. Run `i` writes into
/// `out/run_{i:03}`; the combined table goes to `out/report.csv` in input
/// order.
pub fn run_sweep(configs: &[RunConfig], out: Option<&Path>) -> Result<Vec<RunReport>> {
    let configs: Vec<RunConfig> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = c.clone();
            if let Some(out) = out {
                c.out = Some(out.join(format!("run_{i:03}")));
            }
            c
        })
        .collect();
    let reports = configs.par_iter().map(run).collect::<Result<Vec<_>>>()?;
    if let Some(out) = out {
        ensure_dir(out)?;
        let path = out.join("report.csv");
        for r in &reports {
            export::append_csv_row(&path, &REPORT_HEADER, &r.row())?;
        }
    }
    Ok(reports)
}
