use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SolveError;
use crate::geom::Vec2;
use crate::mesh::Mesh;

/// Constant or linear `a x + b y + c` nodal value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValue {
    Constant(f64),
    Linear { a: f64, b: f64, c: f64 },
}

impl FieldValue {
    pub fn at(&self, p: &Vec2) -> f64 {
        match *self {
            FieldValue::Constant(v) => v,
            FieldValue::Linear { a, b, c } => a * p.x + b * p.y + c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BcKind {
    /// Prescribed temperature on a node set.
    DirichletTemperature { value: FieldValue },
    /// Outward heat flux on an edge set.
    Flux { q: f64 },
    /// Convection `g (phi - ambient)` on an edge set.
    Convection { g: f64, ambient: f64 },
    /// Prescribed displacement components on a node set.
    DirichletDisplacement {
        #[serde(default)]
        ux: Option<f64>,
        #[serde(default)]
        uy: Option<f64>,
    },
    /// Displacement `value * e_r` (radial unit vector about `center`) on a
    /// node set.
    RadialDisplacement { center: [f64; 2], value: f64 },
    /// Uniform traction on an edge set.
    Traction { tx: f64, ty: f64 },
}

impl BcKind {
    pub fn targets_edges(&self) -> bool {
        matches!(self, BcKind::Flux { .. } | BcKind::Convection { .. } | BcKind::Traction { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub target: String,
    #[serde(flatten)]
    pub kind: BcKind,
}

impl BoundaryCondition {
    pub fn new(target: &str, kind: BcKind) -> Self {
        Self {
            target: target.to_string(),
            kind,
        }
    }

    pub fn temperature(target: &str, value: f64) -> Self {
        Self::new(
            target,
            BcKind::DirichletTemperature {
                value: FieldValue::Constant(value),
            },
        )
    }

    pub fn displacement(target: &str, ux: Option<f64>, uy: Option<f64>) -> Self {
        Self::new(target, BcKind::DirichletDisplacement { ux, uy })
    }

    /// Checks that the target set of the right kind exists.
    pub fn check_target(&self, mesh: &Mesh) -> Result<(), SolveError> {
        let found = if self.kind.targets_edges() {
            mesh.edge_sets.contains_key(&self.target)
        } else {
            mesh.node_sets.contains_key(&self.target)
        };
        if found {
            Ok(())
        } else {
            Err(SolveError::MissingSet {
                name: self.target.clone(),
                kind: if self.kind.targets_edges() {
                    "edge set"
                } else {
                    "node set"
                },
            })
        }
    }
}

/// Prescribed values: thermal by node, mechanical by interleaved dof.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    pub thermal: BTreeMap<usize, f64>,
    pub mechanical: BTreeMap<usize, f64>,
}

fn insert(
    map: &mut BTreeMap<usize, f64>,
    key: usize,
    node: usize,
    value: f64,
    field: &'static str,
) -> Result<(), SolveError> {
    match map.insert(key, value) {
        Some(old) if old != value => Err(SolveError::Conflict {
            field,
            node,
            first: old,
            second: value,
        }),
        _ => Ok(()),
    }
}

impl Constraints {
    pub fn from_bcs(mesh: &Mesh, bcs: &[BoundaryCondition]) -> Result<Self, SolveError> {
        let mut c = Constraints::default();
        for bc in bcs {
            bc.check_target(mesh)?;
            if bc.kind.targets_edges() {
                continue;
            }
            let nodes = &mesh.node_sets[&bc.target];
            for &n in nodes {
                let p = mesh.nodes[n];
                match &bc.kind {
                    BcKind::DirichletTemperature { value } => {
                        insert(&mut c.thermal, n, n, value.at(&p), "temperature")?;
                    }
                    BcKind::DirichletDisplacement { ux, uy } => {
                        if let Some(v) = ux {
                            insert(&mut c.mechanical, 2 * n, n, *v, "x-displacement")?;
                        }
                        if let Some(v) = uy {
                            insert(&mut c.mechanical, 2 * n + 1, n, *v, "y-displacement")?;
                        }
                    }
                    BcKind::RadialDisplacement { center, value } => {
                        let d = p - Vec2::new(center[0], center[1]);
                        let r = d.norm();
                        if !(r > 0.0) {
                            return Err(SolveError::Config(format!(
                                "radial displacement at node {n} which coincides with the center"
                            )));
                        }
                        insert(&mut c.mechanical, 2 * n, n, value * d.x / r, "x-displacement")?;
                        insert(&mut c.mechanical, 2 * n + 1, n, value * d.y / r, "y-displacement")?;
                    }
                    _ => unreachable!("edge conditions skipped above"),
                }
            }
        }
        Ok(c)
    }
}
