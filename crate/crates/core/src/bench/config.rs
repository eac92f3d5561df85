use std::path::{Path, PathBuf};

use super::preset::{BenchmarkPreset, Problem};
use crate::error::{Error, Result};
use crate::fem::{ElementFamily, MaterialModel};
use crate::mesh::Triangulation;
use crate::optimizer::SimpConfig;
use crate::solver::SolverKind;

/// Everything needed to reproduce one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub family: ElementFamily,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub triangulation: Triangulation,
    pub refine: usize,
    /// Bevel right height over left height.
    pub bevel_ratio: f64,
    /// Overrides the problem's target volume fraction.
    pub volfrac: Option<f64>,
    pub simp: SimpConfig,
    pub youngs: f64,
    pub poisson: f64,
    pub material: MaterialModel,
    pub estimate_error: bool,
    /// Estimate on the optimized densities instead of the solid design.
    pub estimate_on_design: bool,
    pub out: Option<PathBuf>,
    /// Raster resolution of the density image.
    pub pixels_per_unit: f64,
    /// Write a density image after every iteration.
    pub snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Cantilever,
            family: ElementFamily::Q1,
            nx: None,
            ny: None,
            width: None,
            height: None,
            triangulation: Triangulation::CrossSplit,
            refine: 0,
            bevel_ratio: 1.0 / 3.0,
            volfrac: None,
            simp: SimpConfig::default(),
            youngs: 1.0,
            poisson: 0.3,
            material: MaterialModel::default(),
            estimate_error: false,
            estimate_on_design: false,
            out: None,
            pixels_per_unit: 8.0,
            snapshots: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean '{value}' for '{key}'"))),
    }
}

impl RunConfig {
    pub fn for_problem(problem: Problem, family: ElementFamily) -> Self {
        Self {
            problem,
            family,
            ..Self::default()
        }
    }

    /// Sets one option by its flag name (`nx`, `conv-tol`, ...). Underscores
    /// and dashes are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().trim_start_matches("--").to_ascii_lowercase().replace('_', "-");
        let v = value.trim();
        match k.as_str() {
            "problem" => self.problem = v.parse()?,
            "elem" | "element" => self.family = v.parse()?,
            "nx" => self.nx = Some(parse(&k, v)?),
            "ny" => self.ny = Some(parse(&k, v)?),
            "grid" => {
                let n = parse(&k, v)?;
                self.nx = Some(n);
                self.ny = Some(n);
            }
            "width" => self.width = Some(parse(&k, v)?),
            "height" => self.height = Some(parse(&k, v)?),
            "triangulation" => self.triangulation = v.parse()?,
            "refine" => self.refine = parse(&k, v)?,
            "bevel-ratio" => self.bevel_ratio = parse(&k, v)?,
            "volfrac" => self.volfrac = Some(parse(&k, v)?),
            "penal" => self.simp.penal = parse(&k, v)?,
            "rmin" => self.simp.rmin = parse(&k, v)?,
            "move" => self.simp.move_limit = parse(&k, v)?,
            "damping" => self.simp.damping = parse(&k, v)?,
            "conv-tol" => self.simp.conv_tol = parse(&k, v)?,
            "max-iters" => self.simp.max_iters = parse(&k, v)?,
            "x-min" => self.simp.x_min = parse(&k, v)?,
            "solver" => {
                self.simp.solver = match v.to_ascii_lowercase().as_str() {
                    "direct" | "cholesky" => SolverKind::Direct,
                    "cg" | "pcg" => SolverKind::ConjugateGradient,
                    _ => return Err(Error::Config(format!("unknown solver '{v}' (expected direct or cg)"))),
                }
            }
            "youngs" | "e" => self.youngs = parse(&k, v)?,
            "poisson" | "nu" => self.poisson = parse(&k, v)?,
            "material" => self.material = v.parse()?,
            "estimate-error" => self.estimate_error = parse_bool(&k, v)?,
            "estimate-density" => {
                self.estimate_on_design = match v.to_ascii_lowercase().as_str() {
                    "solid" => false,
                    "design" | "optimized" => true,
                    _ => return Err(Error::Config(format!("unknown estimate density '{v}' (expected solid or design)"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(v)),
            "ppu" => self.pixels_per_unit = parse(&k, v)?,
            "snapshots" => self.snapshots = parse_bool(&k, v)?,
            _ => return Err(Error::Config(format!("unknown option '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_pairs(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn grid(&self) -> (usize, usize) {
        let (dx, dy) = self.problem.default_grid();
        (self.nx.unwrap_or(dx), self.ny.unwrap_or(dy))
    }

    /// Effective SIMP settings, with the problem's volume fraction unless
    /// overridden.
    pub fn simp_config(&self) -> SimpConfig {
        SimpConfig {
            volfrac: self.volfrac.unwrap_or(self.problem.default_volfrac()),
            ..self.simp.clone()
        }
    }

    pub fn preset(&self) -> BenchmarkPreset {
        let (nx, ny) = self.grid();
        let width = self.width.unwrap_or(nx as f64);
        let height = self.height.unwrap_or(ny as f64);
        let mut preset = BenchmarkPreset::new(self.problem, width, height, nx, ny, self.bevel_ratio);
        preset.domain = preset
            .domain
            .with_triangulation(self.triangulation)
            .with_refinement(self.refine);
        preset.volfrac = self.simp_config().volfrac;
        preset
    }

    /// `key=value` lines that reproduce this configuration.
    pub fn to_text(&self) -> String {
        let (nx, ny) = self.grid();
        let p = self.preset();
        let s = self.simp_config();
        let mut lines = vec![
            format!("problem={}", self.problem),
            format!("elem={}", self.family.as_str().to_ascii_lowercase()),
            format!("nx={nx}"),
            format!("ny={ny}"),
            format!("width={}", p.domain.width),
            format!("height={}", p.domain.height),
            format!("triangulation={}", self.triangulation),
            format!("refine={}", self.refine),
            format!("bevel-ratio={}", self.bevel_ratio),
            format!("volfrac={}", s.volfrac),
            format!("penal={}", s.penal),
            format!("rmin={}", s.rmin),
            format!("move={}", s.move_limit),
            format!("damping={}", s.damping),
            format!("conv-tol={}", s.conv_tol),
            format!("max-iters={}", s.max_iters),
            format!("x-min={}", s.x_min),
            format!(
                "solver={}",
                match s.solver {
                    SolverKind::Direct => "direct",
                    SolverKind::ConjugateGradient => "cg",
                }
            ),
            format!("youngs={}", self.youngs),
            format!("poisson={}", self.poisson),
            format!("material={}", self.material),
            format!("estimate-error={}", self.estimate_error),
            format!(
                "estimate-density={}",
                if self.estimate_on_design { "design" } else { "solid" }
            ),
            format!("ppu={}", self.pixels_per_unit),
            format!("snapshots={}", self.snapshots),
        ];
        if let Some(out) = &self.out {
            lines.push(format!("out={}", out.display()));
        }
        lines.join("\n") + "\n"
    }
}

/// Splits `key=value` lines; a bare key means `key=true`.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => out.push((k.trim().to_string(), v.trim().to_string())),
            Some(_) => return Err(Error::Config(format!("line {}: missing key", i + 1))),
            None => out.push((line.to_string(), "true".to_string())),
        }
    }
    Ok(out)
}

/// One run per non-empty line of a sweep file; each line holds
/// whitespace-separated `key=value` overrides applied on top of `base`.
pub fn parse_sweep(base: &RunConfig, text: &str) -> Result<Vec<RunConfig>> {
    let mut runs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cfg = base.clone();
        for token in line.split_whitespace() {
            let (k, v) = token.split_once('=').unwrap_or((token, "true"));
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("sweep line {}: {e}", i + 1)))?;
        }
        runs.push(cfg);
    }
    Ok(runs)
}
