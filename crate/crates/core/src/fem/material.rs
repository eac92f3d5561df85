use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::error::{Error, Result};

/// Which form of the isotropic law feeds the 2D elasticity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaterialModel {
    /// `sigma = lambda tr(eps) I + 2 mu eps` with the 3D Lamé `lambda`
    /// (equivalent to plane strain).
    #[default]
    Lame3d,
    /// Plane stress: `lambda` replaced by `2 lambda mu / (lambda + 2 mu)`.
    PlaneStress,
}

impl MaterialModel {
    pub fn as_str(self) -> &'static str {
        match self {
            MaterialModel::Lame3d => "lame",
            MaterialModel::PlaneStress => "plane-stress",
        }
    }
}

impl fmt::Display for MaterialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MaterialModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lame" | "lame3d" | "lame_3d_form" => Ok(MaterialModel::Lame3d),
            "plane-stress" | "plane_stress" => Ok(MaterialModel::PlaneStress),
            other => Err(Error::Config(format!("unknown material model `{other}`"))),
        }
    }
}

/// Isotropic linear-elastic material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs: f64,
    pub poisson: f64,
    pub model: MaterialModel,
    /// Effective first Lamé parameter for the chosen model.
    pub lambda: f64,
    pub mu: f64,
}

impl Material {
    pub fn new(youngs: f64, poisson: f64, model: MaterialModel) -> Result<Self> {
        if !(youngs > 0.0) || !(poisson > -1.0 && poisson < 0.5) {
            return Err(Error::Config(format!(
                "material requires E > 0 and -1 < nu < 0.5 (got E={youngs}, nu={poisson})"
            )));
        }
        let mu = youngs / (2.0 * (1.0 + poisson));
        let lambda3d = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
        let lambda = match model {
            MaterialModel::Lame3d => lambda3d,
            MaterialModel::PlaneStress => 2.0 * lambda3d * mu / (lambda3d + 2.0 * mu),
        };
        Ok(Self {
            youngs,
            poisson,
            model,
            lambda,
            mu,
        })
    }

    /// Maps engineering strain `(eps_xx, eps_yy, gamma_xy)` to `(sigma_xx, sigma_yy, sigma_xy)`.
    pub fn elasticity_matrix(&self) -> Matrix3<f64> {
        let (l, m) = (self.lambda, self.mu);
        Matrix3::new(l + 2.0 * m, l, 0.0, l, l + 2.0 * m, 0.0, 0.0, 0.0, m)
    }
}

impl Default for Material {
    /// `E = 1`, `nu = 0.3`, Lamé form.
    fn default() -> Self {
        Material::new(1.0, 0.3, MaterialModel::Lame3d).expect("valid default material")
    }
}
