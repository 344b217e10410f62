//! JSON run configuration for `solve`.

use std::path::{Path, PathBuf};

use polytherm::element::{Formulation, Material};
use polytherm::mesh::{load_mesh, validate_with, Mesh, ValidationOptions};
use polytherm::solver::{BoundaryCondition, FieldValue};
use serde::{Deserialize, Serialize};

use crate::input_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    #[default]
    Wachspress,
    Bilinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    Steady,
    Transient {
        dt: f64,
        n_steps: usize,
        #[serde(default = "zero")]
        phi0: FieldValue,
    },
}

fn zero() -> FieldValue {
    FieldValue::Constant(0.0)
}

fn yes() -> bool {
    true
}

fn default_degree() -> usize {
    polytherm::quadrature::DEFAULT_DEGREE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Mesh file, relative to the configuration file.
    pub mesh: PathBuf,
    pub materials: Vec<Material>,
    pub bcs: Vec<BoundaryCondition>,
    pub analysis: Analysis,
    #[serde(default)]
    pub element: ElementKind,
    #[serde(default = "yes")]
    pub accel: bool,
    #[serde(default = "default_degree")]
    pub quad_degree: usize,
    /// Solve the displacement field as well as the temperature.
    #[serde(default = "yes")]
    pub mechanics: bool,
    /// Output directory, relative to the configuration file.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Point sampled at every step of a transient run.
    #[serde(default)]
    pub monitor: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_error(format!("cannot read config {}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| input_error(format!("config {}: {e}", path.display())))
    }

    pub fn formulation(&self) -> Formulation {
        match self.element {
            ElementKind::Wachspress => Formulation::Wachspress {
                degree: self.quad_degree,
                corrected: true,
            },
            ElementKind::Bilinear => Formulation::Bilinear,
        }
    }

    /// Checks everything that does not need a solve; errors are input errors.
    pub fn validate(&self, mesh: &Mesh) -> anyhow::Result<()> {
        if ![1, 2, 4].contains(&self.quad_degree) {
            return Err(input_error(format!("quad_degree must be 1, 2 or 4, got {}", self.quad_degree)));
        }
        if self.materials.is_empty() {
            return Err(input_error("at least one material is required"));
        }
        for (i, m) in self.materials.iter().enumerate() {
            m.check().map_err(|e| input_error(format!("material {i}: {e}")))?;
        }
        if let Analysis::Transient { dt, n_steps, .. } = self.analysis {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(input_error(format!("transient analysis needs dt > 0, got {dt}")));
            }
            if n_steps == 0 {
                return Err(input_error("transient analysis needs n_steps >= 1"));
            }
        }
        let opts = ValidationOptions {
            n_materials: Some(self.materials.len()),
            ..ValidationOptions::default()
        };
        let report = validate_with(mesh, &opts);
        if !report.is_valid() {
            return Err(input_error(format!("invalid mesh: {report}")));
        }
        for bc in &self.bcs {
            bc.check_target(mesh).map_err(|e| input_error(e.to_string()))?;
        }
        if self.element == ElementKind::Bilinear && mesh.elements.iter().any(|e| e.nodes.len() != 4) {
            return Err(input_error("bilinear elements need a mesh of quadrilaterals"));
        }
        Ok(())
    }
}

/// Loaded configuration with paths resolved against its directory.
pub struct Run {
    pub config: RunConfig,
    pub mesh: Mesh,
    pub out_dir: PathBuf,
}

pub fn load_run(path: &Path, out: Option<&Path>) -> anyhow::Result<Run> {
    let config = RunConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mesh_path = base.join(&config.mesh);
    let mesh = load_mesh(&mesh_path).map_err(|e| input_error(format!("mesh {}: {e}", mesh_path.display())))?;
    let out_dir = match (out, &config.output) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => base.join(o),
        (None, None) => base.to_path_buf(),
    };
    Ok(Run { config, mesh, out_dir })
}
