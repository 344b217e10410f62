use std::collections::HashMap;

use super::bc::{BcKind, BoundaryCondition};
use super::sparse::{block_pattern, coupling_pattern, node_graph, scalar_pattern, CsrMatrix};
use super::SolveError;
use crate::accel::ParentCache;
use crate::element::{self, ElementMatrices, Formulation, Material};
use crate::geom::Vec2;
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, Default)]
pub struct AssemblyOptions<'a> {
    pub formulation: Formulation,
    /// Parent-element cache; quadtree cells are taken from it when present.
    pub cache: Option<&'a ParentCache>,
}

/// Global operators. Displacement dofs are interleaved per node.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k_th: CsrMatrix,
    pub m_th: CsrMatrix,
    pub k_el: CsrMatrix,
    pub c_el: CsrMatrix,
    pub f_th: Vec<f64>,
    pub f_el: Vec<f64>,
    pub nodes: Vec<Vec2>,
    /// Nodes touched by a convection edge.
    pub convection_nodes: Vec<usize>,
}

impl GlobalSystem {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Element matrices through the cache when possible, else by direct
/// integration.
pub fn element_matrices(
    poly: &[Vec2],
    mat: &Material,
    opts: &AssemblyOptions,
) -> Result<ElementMatrices, element::ElementError> {
    if let Some(cache) = opts.cache {
        if let Some(m) = cache.element_matrices(poly, mat)? {
            return Ok(m);
        }
    }
    let s = element::shape_samples(poly, opts.formulation)?;
    Ok(element::element_matrices(&s, mat))
}

fn scatter(sys: &mut GlobalSystem, nodes: &[usize], em: &ElementMatrices) {
    for (i, &a) in nodes.iter().enumerate() {
        sys.f_th[a] += em.f_q[i];
        for (j, &b) in nodes.iter().enumerate() {
            sys.k_th.add(a, b, em.k_th[(i, j)]);
            sys.m_th.add(a, b, em.m_th[(i, j)]);
            for r in 0..2 {
                sys.c_el.add(2 * a + r, b, em.c_el[(2 * i + r, j)]);
                for s in 0..2 {
                    sys.k_el.add(2 * a + r, 2 * b + s, em.k_el[(2 * i + r, 2 * j + s)]);
                }
            }
        }
    }
}

pub fn assemble(
    mesh: &Mesh,
    materials: &[Material],
    bcs: &[BoundaryCondition],
    opts: &AssemblyOptions,
) -> Result<GlobalSystem, SolveError> {
    for (index, m) in materials.iter().enumerate() {
        m.check().map_err(|source| SolveError::Material { index, source })?;
    }
    for (e, el) in mesh.elements.iter().enumerate() {
        if el.material >= materials.len() {
            return Err(SolveError::MissingMaterial {
                element: e,
                material: el.material,
            });
        }
    }
    for bc in bcs {
        bc.check_target(mesh)?;
    }

    let n = mesh.n_nodes();
    let graph = node_graph(mesh);
    let k_th = scalar_pattern(&graph);
    let mut sys = GlobalSystem {
        m_th: k_th.clone(),
        k_th,
        k_el: block_pattern(&graph),
        c_el: coupling_pattern(&graph),
        f_th: vec![0.0; n],
        f_el: vec![0.0; 2 * n],
        nodes: mesh.nodes.clone(),
        convection_nodes: Vec::new(),
    };

    for (e, el) in mesh.elements.iter().enumerate() {
        let poly = mesh.coords(e);
        let em = element_matrices(&poly, &materials[el.material], opts)
            .map_err(|source| SolveError::Element { element: e, source })?;
        scatter(&mut sys, &el.nodes, &em);
    }

    if bcs.iter().any(|bc| bc.kind.targets_edges()) {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for [a, b] in mesh.boundary_edges() {
            owner.insert((a.min(b), a.max(b)), 0);
        }
        for (e, el) in mesh.elements.iter().enumerate() {
            for (a, b) in el.edges() {
                if let Some(o) = owner.get_mut(&(a.min(b), a.max(b))) {
                    *o = e;
                }
            }
        }
        for bc in bcs.iter().filter(|bc| bc.kind.targets_edges()) {
            for &[a, b] in &mesh.edge_sets[&bc.target] {
                let Some(&e) = owner.get(&(a.min(b), a.max(b))) else {
                    return Err(SolveError::EdgeNotOnBoundary {
                        set: bc.target.clone(),
                        edge: [a, b],
                    });
                };
                let t = materials[mesh.elements[e].material].thickness;
                let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
                let wrap = |source| SolveError::Element { element: e, source };
                match &bc.kind {
                    BcKind::Flux { q } => {
                        let f = element::flux_edge(&pa, &pb, *q, t).map_err(wrap)?;
                        sys.f_th[a] += f[0];
                        sys.f_th[b] += f[1];
                    }
                    BcKind::Convection { g, ambient } => {
                        let (k, f) = element::convection_edge(&pa, &pb, *g, *ambient, t).map_err(wrap)?;
                        let ids = [a, b];
                        for i in 0..2 {
                            sys.f_th[ids[i]] += f[i];
                            for j in 0..2 {
                                sys.k_th.add(ids[i], ids[j], k[i][j]);
                            }
                        }
                        sys.convection_nodes.extend_from_slice(&ids);
                    }
                    BcKind::Traction { tx, ty } => {
                        let f = element::traction_edge(&pa, &pb, Vec2::new(*tx, *ty), t).map_err(wrap)?;
                        sys.f_el[2 * a] += f[0];
                        sys.f_el[2 * a + 1] += f[1];
                        sys.f_el[2 * b] += f[2];
                        sys.f_el[2 * b + 1] += f[3];
                    }
                    _ => unreachable!("only edge conditions reach here"),
                }
            }
        }
        sys.convection_nodes.sort_unstable();
        sys.convection_nodes.dedup();
    }
    Ok(sys)
}
