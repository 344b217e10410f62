//! Backward Euler for `M phi' + K phi = f` with quasi-static mechanics.

use std::collections::BTreeMap;

use super::dirichlet::Elimination;
use super::linear::{factorize, Factorization};
use super::sparse::CsrMatrix;
use super::{check_thermal_anchors, Constraints, FieldState, GlobalSystem, MechanicalSolver, SolveError};

#[derive(Debug, Clone, PartialEq)]
pub struct TransientConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Initial nodal temperatures.
    pub phi0: Vec<f64>,
    /// Solve the displacement field at every step.
    pub mechanics: bool,
}

/// One backward Euler step `(K + M/dt) phi_n = f + (M/dt) phi_{n-1}` with
/// fixed Dirichlet values; the shifted matrix is factored once.
#[derive(Debug)]
pub struct BackwardEuler {
    elim: Elimination,
    fact: Factorization,
    m_dt: CsrMatrix,
    f: Vec<f64>,
}

impl BackwardEuler {
    /// `k` and `m` must share one sparsity pattern.
    pub fn new(
        k: &CsrMatrix,
        m: &CsrMatrix,
        f: &[f64],
        fixed: &BTreeMap<usize, f64>,
        dt: f64,
    ) -> Result<Self, SolveError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolveError::Config(format!("time step must be positive, got {dt}")));
        }
        let shifted = k.linear_combination(1.0, m, 1.0 / dt);
        let elim = Elimination::new(&shifted, fixed);
        let fact = factorize(&elim.reduced)?;
        let mut m_dt = m.clone();
        for v in &mut m_dt.values {
            *v /= dt;
        }
        Ok(Self {
            elim,
            fact,
            m_dt,
            f: f.to_vec(),
        })
    }

    /// Next state and the relative residual of the reduced solve.
    pub fn step(&self, prev: &[f64]) -> Result<(Vec<f64>, f64), SolveError> {
        let mp = self.m_dt.mul_vec(prev);
        let rhs: Vec<f64> = self.f.iter().zip(&mp).map(|(f, m)| f + m).collect();
        let (x, res) = self.fact.solve(&self.elim.reduce_rhs(&rhs))?;
        Ok((self.elim.expand(&x), res))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientSolution {
    /// States at `dt, 2 dt, ..., n_steps dt`.
    pub states: Vec<FieldState>,
    pub max_residual: f64,
}

pub fn solve_transient(
    system: &GlobalSystem,
    constraints: &Constraints,
    config: &TransientConfig,
) -> Result<TransientSolution, SolveError> {
    let n = system.n_nodes();
    if config.phi0.len() != n {
        return Err(SolveError::Config(format!(
            "initial temperature has {} entries for {n} nodes",
            config.phi0.len()
        )));
    }
    check_thermal_anchors(system, &constraints.thermal).or_else(|e| {
        // A floating region is still well posed in time thanks to the mass
        // term; only steady problems need an anchor.
        match e {
            SolveError::FloatingThermal { .. } => Ok(()),
            other => Err(other),
        }
    })?;
    let stepper = BackwardEuler::new(&system.k_th, &system.m_th, &system.f_th, &constraints.thermal, config.dt)?;
    let mech = if config.mechanics {
        Some(MechanicalSolver::new(system, constraints)?)
    } else {
        None
    };
    let mut states = Vec::with_capacity(config.n_steps);
    let mut prev = config.phi0.clone();
    let mut max_residual = 0.0f64;
    for k in 1..=config.n_steps {
        let (phi, r) = stepper.step(&prev)?;
        max_residual = max_residual.max(r);
        let u = match &mech {
            Some(ms) => {
                let (u, r) = ms.solve(system, &phi)?;
                max_residual = max_residual.max(r);
                u
            }
            None => vec![0.0; 2 * n],
        };
        prev = phi.clone();
        states.push(FieldState {
            t: k as f64 * config.dt,
            phi,
            u,
        });
    }
    Ok(TransientSolution { states, max_residual })
}
