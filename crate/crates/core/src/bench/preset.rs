use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::DomainSpec;
use crate::solver::{BoundarySide, LoadCase, NodeSelector, PointLoad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Cantilever,
    Bridge,
    Bevel,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::Cantilever, Problem::Bridge, Problem::Bevel];

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Cantilever => "cantilever",
            Problem::Bridge => "bridge",
            Problem::Bevel => "bevel",
        }
    }

    /// Default `(nx, ny)`.
    pub fn default_grid(self) -> (usize, usize) {
        match self {
            Problem::Cantilever => (32, 20),
            Problem::Bridge => (30, 30),
            Problem::Bevel => (40, 30),
        }
    }

    pub fn default_volfrac(self) -> f64 {
        match self {
            Problem::Cantilever => 0.4,
            Problem::Bridge => 0.3,
            Problem::Bevel => 0.5,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cantilever" => Ok(Problem::Cantilever),
            "bridge" => Ok(Problem::Bridge),
            "bevel" | "beveled" | "beveled-beam" => Ok(Problem::Bevel),
            other => Err(Error::Config(format!(
                "unknown problem '{other}' (expected cantilever, bridge or bevel)"
            ))),
        }
    }
}

/// Domain, loads and target volume of one benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPreset {
    pub problem: Problem,
    pub domain: DomainSpec,
    pub volfrac: f64,
    pub case: LoadCase,
}

/// Downward unit load.
pub const UNIT_LOAD: [f64; 2] = [0.0, -1.0];

impl BenchmarkPreset {
    /// Builds the benchmark on a `width x height` domain split into
    /// `nx x ny` cells. For the bevel, `right_ratio` is the right height as a
    /// fraction of the left height.
    pub fn new(problem: Problem, width: f64, height: f64, nx: usize, ny: usize, right_ratio: f64) -> Self {
        let (domain, case) = match problem {
            Problem::Cantilever => (
                DomainSpec::rectangle(width, height, nx, ny),
                LoadCase {
                    supports: vec![NodeSelector::Side(BoundarySide::West)],
                    point_loads: vec![PointLoad {
                        at: NodeSelector::NearestTo([width, 0.0]),
                        force: UNIT_LOAD,
                    }],
                    ..LoadCase::default()
                },
            ),
            Problem::Bridge => (
                DomainSpec::rectangle(width, height, nx, ny),
                LoadCase {
                    supports: vec![
                        NodeSelector::NearestTo([0.0, 0.0]),
                        NodeSelector::NearestTo([width, 0.0]),
                    ],
                    point_loads: vec![PointLoad {
                        at: NodeSelector::NearestTo([0.5 * width, 0.0]),
                        force: UNIT_LOAD,
                    }],
                    ..LoadCase::default()
                },
            ),
            Problem::Bevel => (
                DomainSpec::trapezoid(width, height, right_ratio * height, nx, ny),
                LoadCase {
                    supports: vec![NodeSelector::Side(BoundarySide::West)],
                    point_loads: vec![PointLoad {
                        at: NodeSelector::NearestTo([width, 0.5 * height]),
                        force: UNIT_LOAD,
                    }],
                    ..LoadCase::default()
                },
            ),
        };
        Self {
            problem,
            domain,
            volfrac: problem.default_volfrac(),
            case,
        }
    }

    /// Default grid with one length unit per cell.
    pub fn standard(problem: Problem) -> Self {
        let (nx, ny) = problem.default_grid();
        Self::new(problem, nx as f64, ny as f64, nx, ny, 1.0 / 3.0)
    }
}
