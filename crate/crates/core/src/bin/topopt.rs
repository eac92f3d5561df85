use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use topopt::bench::{self, parse_sweep, Problem, RunConfig};
use topopt::{ElementFamily, MaterialModel, Triangulation};

/// SIMP topology optimization benchmarks on Q1/P1/P2 meshes.
#[derive(Debug, Parser)]
#[command(name = "topopt", version)]
struct Cli {
    /// cantilever, bridge or bevel
    #[arg(long)]
    problem: Option<Problem>,
    /// q1, p1 or p2
    #[arg(long)]
    elem: Option<ElementFamily>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Sets both nx and ny
    #[arg(long)]
    grid: Option<usize>,
    /// Domain width (defaults to nx)
    #[arg(long)]
    width: Option<f64>,
    /// Domain height (defaults to ny)
    #[arg(long)]
    height: Option<f64>,
    /// two or cross
    #[arg(long)]
    triangulation: Option<Triangulation>,
    /// Uniform refinement levels
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    volfrac: Option<f64>,
    #[arg(long)]
    penal: Option<f64>,
    /// Filter radius in element sizes
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long = "move")]
    move_limit: Option<f64>,
    #[arg(long)]
    conv_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// lame or plane-stress
    #[arg(long)]
    material: Option<MaterialModel>,
    /// direct or cg
    #[arg(long)]
    solver: Option<String>,
    /// Right height over left height of the bevel
    #[arg(long)]
    bevel_ratio: Option<f64>,
    /// Pixels per length unit of the density image
    #[arg(long)]
    ppu: Option<f64>,
    /// Estimate the discretization error on the solid design
    #[arg(long)]
    estimate_error: bool,
    /// solid or design
    #[arg(long)]
    estimate_density: Option<String>,
    /// Write a density image after every iteration
    #[arg(long)]
    snapshots: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value configuration file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// One run per line of key=value overrides, executed in parallel
    #[arg(long)]
    sweep: Option<PathBuf>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        fn push<T: ToString>(v: &mut Vec<(&'static str, String)>, key: &'static str, value: &Option<T>) {
            if let Some(x) = value {
                v.push((key, x.to_string()));
            }
        }
        let mut v = Vec::new();
        push(&mut v, "problem", &self.problem);
        push(&mut v, "elem", &self.elem.map(|f| f.as_str()));
        push(&mut v, "grid", &self.grid);
        push(&mut v, "nx", &self.nx);
        push(&mut v, "ny", &self.ny);
        push(&mut v, "width", &self.width);
        push(&mut v, "height", &self.height);
        push(&mut v, "triangulation", &self.triangulation);
        push(&mut v, "refine", &self.refine);
        push(&mut v, "volfrac", &self.volfrac);
        push(&mut v, "penal", &self.penal);
        push(&mut v, "rmin", &self.rmin);
        push(&mut v, "move", &self.move_limit);
        push(&mut v, "conv-tol", &self.conv_tol);
        push(&mut v, "max-iters", &self.max_iters);
        push(&mut v, "material", &self.material);
        push(&mut v, "solver", &self.solver);
        push(&mut v, "bevel-ratio", &self.bevel_ratio);
        push(&mut v, "ppu", &self.ppu);
        push(&mut v, "estimate-density", &self.estimate_density);
        if self.estimate_error {
            v.push(("estimate-error", "true".into()));
        }
        if self.snapshots {
            v.push(("snapshots", "true".into()));
        }
        v
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> topopt::Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for (key, value) in cli.overrides() {
        config.set(key, &value)?;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }

    if let Some(path) = &cli.sweep {
        let text = std::fs::read_to_string(path).map_err(|e| topopt::Error::io(path, e))?;
        let runs = parse_sweep(&config, &text)?;
        let out = config.out.clone();
        for report in bench::run_sweep(&runs, out.as_deref())? {
            println!("{}", report.summary());
        }
        return Ok(());
    }

    let report = bench::run(&config)?;
    println!("{}", report.summary());
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
