//! Global assembly, Dirichlet elimination, and the steady and transient
//! two-step (thermal, then quasi-static mechanical) solves.

mod assembly;
mod bc;
mod dirichlet;
mod linear;
pub mod sparse;
mod transient;

pub use assembly::{assemble, AssemblyOptions, GlobalSystem};
pub use bc::{BcKind, BoundaryCondition, Constraints, FieldValue};
pub use dirichlet::{apply_dirichlet, Elimination};
pub use linear::{diagonal_condition, factorize, linear_solve, Factorization, RESIDUAL_TOL};
pub use sparse::CsrMatrix;
pub use transient::{solve_transient, BackwardEuler, TransientConfig, TransientSolution};

use std::collections::BTreeMap;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use thiserror::Error;

use crate::element::{self, ElementError, Formulation, Material};
use crate::geom::Vec2;
use crate::mesh::Mesh;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix of size {size} is not positive definite (diagonal condition estimate {condition_estimate:.3e})")]
    NotPositiveDefinite { size: usize, condition_estimate: f64 },
    #[error("relative residual {residual:.3e} exceeds tolerance (diagonal condition estimate {condition_estimate:.3e})")]
    Residual { residual: f64, condition_estimate: f64 },
    #[error("floating thermal island: {nodes} nodes around node {node} have no Dirichlet or convection condition")]
    FloatingThermal { nodes: usize, node: usize },
    #[error("free rigid-body mode ({mode}) in the part containing node {node}")]
    RigidBody { mode: String, node: usize },
    #[error("conflicting {field} prescriptions at node {node}: {first} vs {second}")]
    Conflict {
        field: &'static str,
        node: usize,
        first: f64,
        second: f64,
    },
    #[error("boundary condition target `{name}` not found among mesh {kind}s")]
    MissingSet { name: String, kind: &'static str },
    #[error("element {element} references missing material {material}")]
    MissingMaterial { element: usize, material: usize },
    #[error("edge ({}, {}) of set `{set}` is not a boundary edge", edge[0], edge[1])]
    EdgeNotOnBoundary { set: String, edge: [usize; 2] },
    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: ElementError,
    },
    #[error("material {index}: {source}")]
    Material {
        index: usize,
        #[source]
        source: ElementError,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Nodal fields at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub phi: Vec<f64>,
    /// Interleaved `(ux_0, uy_0, ux_1, ...)`.
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadySolution {
    pub state: FieldState,
    pub residual_thermal: f64,
    pub residual_mechanical: f64,
}

/// Connected components of the sparsity graph of a square matrix.
fn components(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows;
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        label[s] = id;
        let mut comp = Vec::new();
        while let Some(i) = stack.pop() {
            comp.push(i);
            for &j in a.row(i).0 {
                if label[j] == usize::MAX {
                    label[j] = id;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn check_thermal_anchors(system: &GlobalSystem, fixed: &BTreeMap<usize, f64>) -> Result<(), SolveError> {
    let mut anchored = vec![false; system.n_nodes()];
    for &n in fixed.keys().chain(&system.convection_nodes) {
        anchored[n] = true;
    }
    for comp in components(&system.k_th) {
        if !comp.iter().any(|&n| anchored[n]) {
            return Err(SolveError::FloatingThermal {
                nodes: comp.len(),
                node: comp[0],
            });
        }
    }
    Ok(())
}

fn check_rigid_modes(system: &GlobalSystem, fixed: &BTreeMap<usize, f64>) -> Result<(), SolveError> {
    for comp in components(&system.k_th) {
        let c = comp.iter().fold(Vec2::zeros(), |a, &n| a + system.nodes[n]) / comp.len() as f64;
        let scale = comp
            .iter()
            .map(|&n| (system.nodes[n] - c).norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        // Gram matrix of the rigid modes restricted to constrained dofs.
        let mut g = Matrix3::zeros();
        for &n in &comp {
            let r = (system.nodes[n] - c) / scale;
            for (axis, dof) in [(0usize, 2 * n), (1, 2 * n + 1)] {
                if !fixed.contains_key(&dof) {
                    continue;
                }
                let v = if axis == 0 {
                    nalgebra::Vector3::new(1.0, 0.0, -r.y)
                } else {
                    nalgebra::Vector3::new(0.0, 1.0, r.x)
                };
                g += v * v.transpose();
            }
        }
        let eig = SymmetricEigen::new(g);
        let (k, min) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        if min <= 1e-10 * comp.len().max(1) as f64 {
            let v = eig.eigenvectors.column(k);
            let names = ["x-translation", "y-translation", "rotation"];
            let mut parts: Vec<&str> = (0..3).filter(|&i| v[i].abs() > 1e-6).map(|i| names[i]).collect();
            if parts.is_empty() {
                parts.push("unknown");
            }
            return Err(SolveError::RigidBody {
                mode: parts.join(" + "),
                node: comp[0],
            });
        }
    }
    Ok(())
}

/// Steady conduction `K_th phi = f_th` with Dirichlet elimination.
pub fn solve_thermal(system: &GlobalSystem, constraints: &Constraints) -> Result<(Vec<f64>, f64), SolveError> {
    check_thermal_anchors(system, &constraints.thermal)?;
    let (elim, rhs) = apply_dirichlet(&system.k_th, &system.f_th, &constraints.thermal);
    let (x, res) = factorize(&elim.reduced)?.solve(&rhs)?;
    Ok((elim.expand(&x), res))
}

/// Quasi-static elasticity for a fixed temperature field, with the reduced
/// stiffness factored once.
#[derive(Debug)]
pub struct MechanicalSolver {
    elim: Elimination,
    fact: Factorization,
}

impl MechanicalSolver {
    pub fn new(system: &GlobalSystem, constraints: &Constraints) -> Result<Self, SolveError> {
        check_rigid_modes(system, &constraints.mechanical)?;
        let elim = Elimination::new(&system.k_el, &constraints.mechanical);
        let fact = factorize(&elim.reduced)?;
        Ok(Self { elim, fact })
    }

    /// Solves `K_el u = f_el - C_el phi`.
    pub fn solve(&self, system: &GlobalSystem, phi: &[f64]) -> Result<(Vec<f64>, f64), SolveError> {
        let cphi = system.c_el.mul_vec(phi);
        let f: Vec<f64> = system.f_el.iter().zip(&cphi).map(|(f, c)| f - c).collect();
        let rhs = self.elim.reduce_rhs(&f);
        let (x, res) = self.fact.solve(&rhs)?;
        Ok((self.elim.expand(&x), res))
    }
}

/// Two-step steady solve: temperature, then displacement.
pub fn solve_steady(system: &GlobalSystem, constraints: &Constraints) -> Result<SteadySolution, SolveError> {
    let (phi, residual_thermal) = solve_thermal(system, constraints)?;
    let mech = MechanicalSolver::new(system, constraints)?;
    let (u, residual_mechanical) = mech.solve(system, &phi)?;
    Ok(SteadySolution {
        state: FieldState { t: 0.0, phi, u },
        residual_thermal,
        residual_mechanical,
    })
}

/// Area-averaged stress of every element for the given nodal fields.
pub fn element_stresses(
    mesh: &Mesh,
    materials: &[Material],
    formulation: Formulation,
    state: &FieldState,
) -> Result<Vec<Vector3<f64>>, SolveError> {
    mesh.elements
        .iter()
        .enumerate()
        .map(|(e, el)| {
            let mat = materials.get(el.material).ok_or(SolveError::MissingMaterial {
                element: e,
                material: el.material,
            })?;
            let s = element::shape_samples(&mesh.coords(e), formulation)
                .map_err(|source| SolveError::Element { element: e, source })?;
            let phi: Vec<f64> = el.nodes.iter().map(|&n| state.phi[n]).collect();
            let u: Vec<f64> = el.nodes.iter().flat_map(|&n| [state.u[2 * n], state.u[2 * n + 1]]).collect();
            Ok(element::element_stress(&s, mat, &phi, &u))
        })
        .collect()
}
