//! Quadtree meshes with 2:1 edge balance.
//!
//! Cells live on an integer lattice whose unit is the base cell size divided
//! by `2^max_depth`, so neighbour lookups and midpoint tests are exact.
//! Leaves become polygons whose vertex lists include the mid-edge nodes
//! contributed by finer neighbours (4 to 8 vertices).

use std::collections::{BTreeMap, HashSet};

use super::{Mesh, MeshError, PolyElement};
use crate::geom::{Rect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadtreeSpec {
    pub domain: Rect,
    /// Base grid of depth-0 square cells.
    pub nx: usize,
    pub ny: usize,
    pub max_depth: u32,
}

impl QuadtreeSpec {
    pub fn new(domain: Rect, nx: usize, ny: usize) -> Self {
        Self {
            domain,
            nx,
            ny,
            max_depth: 10,
        }
    }
}

/// Split every leaf overlapping `region` until it reaches `depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub region: Rect,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadtreeCell {
    pub origin: Vec2,
    pub side: f64,
    pub depth: u32,
    /// Empty for leaves, otherwise the four children (BL, BR, TR, TL).
    pub children: Vec<usize>,
    ix: i64,
    iy: i64,
    size: i64,
}

impl QuadtreeCell {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Quadtree {
    spec: QuadtreeSpec,
    cells: Vec<QuadtreeCell>,
    base_size: i64,
}

impl Quadtree {
    pub fn new(spec: QuadtreeSpec) -> Result<Self, MeshError> {
        let d = spec.domain;
        if !(d.width() > 0.0 && d.height() > 0.0) || spec.nx == 0 || spec.ny == 0 {
            return Err(MeshError::Parameter(
                "quadtree domain must have positive size and at least one base cell".into(),
            ));
        }
        let hx = d.width() / spec.nx as f64;
        let hy = d.height() / spec.ny as f64;
        if ((hx - hy) / hx).abs() > 1e-12 {
            return Err(MeshError::Parameter(format!(
                "base cells must be square, got {hx} x {hy}"
            )));
        }
        if spec.max_depth > 30 {
            return Err(MeshError::Parameter("max_depth must be at most 30".into()));
        }
        let base_size = 1i64 << spec.max_depth;
        let mut cells = Vec::with_capacity(spec.nx * spec.ny);
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                cells.push(QuadtreeCell {
                    origin: Vec2::zeros(),
                    side: 0.0,
                    depth: 0,
                    children: Vec::new(),
                    ix: i as i64 * base_size,
                    iy: j as i64 * base_size,
                    size: base_size,
                });
            }
        }
        let mut tree = Self {
            spec,
            cells,
            base_size,
        };
        for c in 0..tree.cells.len() {
            tree.fill_geometry(c);
        }
        Ok(tree)
    }

    pub fn cells(&self) -> &[QuadtreeCell] {
        &self.cells
    }

    pub fn leaves(&self) -> impl Iterator<Item = &QuadtreeCell> {
        self.cells.iter().filter(|c| c.is_leaf())
    }

    fn x_of(&self, ix: i64) -> f64 {
        let denom = (self.spec.nx as i64 * self.base_size) as f64;
        self.spec.domain.x0 + self.spec.domain.width() * ix as f64 / denom
    }

    fn y_of(&self, iy: i64) -> f64 {
        let denom = (self.spec.ny as i64 * self.base_size) as f64;
        self.spec.domain.y0 + self.spec.domain.height() * iy as f64 / denom
    }

    fn fill_geometry(&mut self, c: usize) {
        let (ix, iy, size) = (self.cells[c].ix, self.cells[c].iy, self.cells[c].size);
        let origin = Vec2::new(self.x_of(ix), self.y_of(iy));
        let side = self.x_of(ix + size) - origin.x;
        self.cells[c].origin = origin;
        self.cells[c].side = side;
    }

    fn cell_rect(&self, c: usize) -> Rect {
        let cell = &self.cells[c];
        Rect::new(
            self.x_of(cell.ix),
            self.y_of(cell.iy),
            self.x_of(cell.ix + cell.size),
            self.y_of(cell.iy + cell.size),
        )
    }

    fn split(&mut self, c: usize) {
        debug_assert!(self.cells[c].is_leaf());
        let QuadtreeCell {
            ix, iy, size, depth, ..
        } = self.cells[c];
        let h = size / 2;
        let first = self.cells.len();
        for (dx, dy) in [(0, 0), (h, 0), (h, h), (0, h)] {
            self.cells.push(QuadtreeCell {
                origin: Vec2::zeros(),
                side: 0.0,
                depth: depth + 1,
                children: Vec::new(),
                ix: ix + dx,
                iy: iy + dy,
                size: h,
            });
            let idx = self.cells.len() - 1;
            self.fill_geometry(idx);
        }
        self.cells[c].children = (first..first + 4).collect();
    }

    /// Deepest cell with depth at most `max_depth` containing lattice point
    /// `(px, py)`, or `None` outside the domain.
    fn find(&self, px: i64, py: i64, max_depth: u32) -> Option<usize> {
        let (bx, by) = (px.div_euclid(self.base_size), py.div_euclid(self.base_size));
        if bx < 0 || by < 0 || bx >= self.spec.nx as i64 || by >= self.spec.ny as i64 {
            return None;
        }
        let mut c = by as usize * self.spec.nx + bx as usize;
        while !self.cells[c].is_leaf() && self.cells[c].depth < max_depth {
            let cell = &self.cells[c];
            let h = cell.size / 2;
            let right = px >= cell.ix + h;
            let up = py >= cell.iy + h;
            let k = match (right, up) {
                (false, false) => 0,
                (true, false) => 1,
                (true, true) => 2,
                (false, true) => 3,
            };
            c = cell.children[k];
        }
        Some(c)
    }

    /// Refines leaves overlapping each region to its target depth.
    pub fn refine(&mut self, refinements: &[Refinement]) -> Result<(), MeshError> {
        for r in refinements {
            if r.depth > self.spec.max_depth {
                return Err(MeshError::Parameter(format!(
                    "target depth {} exceeds max_depth {}",
                    r.depth, self.spec.max_depth
                )));
            }
            if !r.region.overlaps(&self.spec.domain) {
                return Err(MeshError::RegionOutsideDomain(r.region));
            }
        }
        for r in refinements {
            loop {
                let todo: Vec<usize> = (0..self.cells.len())
                    .filter(|&c| {
                        let cell = &self.cells[c];
                        cell.is_leaf() && cell.depth < r.depth && self.cell_rect(c).overlaps(&r.region)
                    })
                    .collect();
                if todo.is_empty() {
                    break;
                }
                for c in todo {
                    self.split(c);
                }
            }
        }
        Ok(())
    }

    /// Enforces 2:1 balance across edges; returns the number of splits made.
    pub fn balance(&mut self) -> usize {
        let mut splits = 0;
        loop {
            let mut todo = Vec::new();
            for c in 0..self.cells.len() {
                let cell = &self.cells[c];
                if !cell.is_leaf() || cell.depth < 2 {
                    continue;
                }
                // Parent geometry follows from the lattice alignment.
                let s = cell.size;
                let (px, py) = (cell.ix - cell.ix.rem_euclid(2 * s), cell.iy - cell.iy.rem_euclid(2 * s));
                let parent_size = 2 * s;
                let qx = (cell.ix - px) / s;
                let qy = (cell.iy - py) / s;
                let probe_x = if qx == 0 { px - 1 } else { px + parent_size };
                let probe_y = if qy == 0 { py - 1 } else { py + parent_size };
                for (x, y) in [(probe_x, py), (px, probe_y)] {
                    if let Some(n) = self.find(x, y, cell.depth - 1) {
                        if self.cells[n].is_leaf() && self.cells[n].depth + 1 < cell.depth {
                            todo.push(n);
                        }
                    }
                }
            }
            todo.sort_unstable();
            todo.dedup();
            if todo.is_empty() {
                return splits;
            }
            for c in todo {
                if self.cells[c].is_leaf() {
                    self.split(c);
                    splits += 1;
                }
            }
        }
    }

    /// True when no two edge-adjacent leaves differ by more than one level.
    pub fn is_balanced(&self) -> bool {
        self.clone().balance() == 0
    }

    pub fn to_mesh(&self) -> Mesh {
        let mut leaves: Vec<usize> = (0..self.cells.len())
            .filter(|&c| self.cells[c].is_leaf())
            .collect();
        leaves.sort_by_key(|&c| (self.cells[c].iy, self.cells[c].ix));

        let mut corners: HashSet<(i64, i64)> = HashSet::new();
        for &c in &leaves {
            let QuadtreeCell { ix, iy, size, .. } = self.cells[c];
            corners.extend([(ix, iy), (ix + size, iy), (ix + size, iy + size), (ix, iy + size)]);
        }
        // Row-major (y, then x) numbering matches the structured generator.
        let ordered: BTreeMap<(i64, i64), ()> = corners.iter().map(|&(x, y)| ((y, x), ())).collect();
        let mut id_of = std::collections::HashMap::with_capacity(ordered.len());
        let mut nodes = Vec::with_capacity(ordered.len());
        for (i, &(y, x)) in ordered.keys().enumerate() {
            id_of.insert((x, y), i);
            nodes.push(Vec2::new(self.x_of(x), self.y_of(y)));
        }

        let mut elements = Vec::with_capacity(leaves.len());
        for &c in &leaves {
            let QuadtreeCell { ix, iy, size: s, .. } = self.cells[c];
            let h = s / 2;
            let ring = [
                (ix, iy),
                (ix + h, iy),
                (ix + s, iy),
                (ix + s, iy + h),
                (ix + s, iy + s),
                (ix + h, iy + s),
                (ix, iy + s),
                (ix, iy + h),
            ];
            let mut ids = Vec::with_capacity(8);
            for (k, p) in ring.iter().enumerate() {
                let is_mid = k % 2 == 1;
                if is_mid && (s % 2 != 0 || !corners.contains(p)) {
                    continue;
                }
                ids.push(id_of[p]);
            }
            elements.push(PolyElement::new(ids, 0));
        }
        let mut mesh = Mesh::new(nodes, elements);
        mesh.add_rect_sides(&self.spec.domain);
        mesh
    }
}

/// Builds a balanced quadtree mesh: refine each region, enforce 2:1 balance
/// and emit leaves as polygons with hanging nodes promoted to vertices.
pub fn gen_quadtree(spec: QuadtreeSpec, refinements: &[Refinement]) -> Result<Mesh, MeshError> {
    let mut tree = Quadtree::new(spec)?;
    tree.refine(refinements)?;
    tree.balance();
    Ok(tree.to_mesh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_structured_quads, validate};

    fn unit_2x2() -> QuadtreeSpec {
        QuadtreeSpec::new(Rect::new(0.0, 0.0, 2.0, 2.0), 2, 2)
    }

    #[test]
    fn one_split_gives_two_pentagons() {
        let r = Refinement {
            region: Rect::new(0.1, 0.1, 0.9, 0.9),
            depth: 1,
        };
        let m = gen_quadtree(unit_2x2(), &[r]).unwrap();
        assert_eq!(m.n_elements(), 7);
        assert_eq!(m.n_nodes(), 14);
        let mut sizes: Vec<usize> = m.elements.iter().map(|e| e.nodes.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![4, 4, 4, 4, 4, 5, 5]);
        // The diagonal cell (1,1)-(2,2) stays a quad.
        let diag = m
            .elements
            .iter()
            .find(|e| e.nodes.iter().any(|&n| m.nodes[n] == Vec2::new(2.0, 2.0)))
            .unwrap();
        assert_eq!(diag.nodes.len(), 4);
        assert!(validate(&m).is_valid(), "{}", validate(&m));
    }

    #[test]
    fn no_refinement_matches_structured() {
        let spec = QuadtreeSpec::new(Rect::new(0.0, 0.0, 5.0, 1.0), 50, 10);
        let q = gen_quadtree(spec, &[]).unwrap();
        let s = gen_structured_quads(5.0, 1.0, 50, 10).unwrap();
        assert_eq!(q, s);
    }

    #[test]
    fn balancing_inserts_intermediate_splits() {
        let spec = QuadtreeSpec::new(Rect::new(0.0, 0.0, 4.0, 4.0), 4, 4);
        let mut tree = Quadtree::new(spec).unwrap();
        // Depth 3 in a corner of cell (1,1) forces a gap against its neighbours.
        tree.refine(&[Refinement {
            region: Rect::new(1.0, 1.0, 1.05, 1.05),
            depth: 3,
        }])
        .unwrap();
        assert!(!tree.is_balanced());
        let splits = tree.balance();
        assert!(splits > 0);
        assert!(tree.is_balanced());
        assert_eq!(tree.balance(), 0, "balancing must be idempotent");
        let m = tree.to_mesh();
        assert!(validate(&m).is_valid(), "{}", validate(&m));
        assert!(m.elements.iter().all(|e| (4..=8).contains(&e.nodes.len())));
        assert!((m.total_area() - 16.0).abs() < 1e-10 * 16.0);
    }

    #[test]
    fn region_outside_domain_is_rejected() {
        let r = Refinement {
            region: Rect::new(5.0, 5.0, 6.0, 6.0),
            depth: 1,
        };
        assert!(matches!(
            gen_quadtree(unit_2x2(), &[r]),
            Err(MeshError::RegionOutsideDomain(_))
        ));
        let r = Refinement {
            region: Rect::new(0.0, 0.0, 1.0, 1.0),
            depth: 11,
        };
        assert!(gen_quadtree(unit_2x2(), &[r]).is_err());
    }

    #[test]
    fn non_square_base_cells_rejected() {
        let spec = QuadtreeSpec::new(Rect::new(0.0, 0.0, 2.0, 1.0), 1, 1);
        assert!(Quadtree::new(spec).is_err());
    }
}
