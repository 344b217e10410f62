//! Parent-element cache for quadtree cells.
//!
//! A quadtree leaf is an axis-aligned square whose vertex list holds its four
//! corners and any subset of its edge midpoints. Matrices of such a cell are
//! those of the unit square with the same midpoint pattern, rescaled:
//!
//! ```text
//! K_th = t (kx Kx + ky Ky)         M_th = rho c t L^2 M
//! K_el = E t K(nu)                 C_el = E alpha f L t C(nu),  f = 1 or 1 + nu
//! f_q  = Q t L^2 F
//! ```
//!
//! where the right-hand sides are computed once per pattern with unit
//! parameters.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::element::{self, d_matrix, ElementError, ElementMatrices, Formulation, Material, Plane};
use crate::geom::Vec2;

/// Canonical vertex slots of a parent cell, counter-clockwise from the
/// lower-left corner: BL, MB, BR, MR, TR, MT, TL, ML.
const SLOTS: [(f64, f64); 8] = [
    (0.0, 0.0),
    (0.5, 0.0),
    (1.0, 0.0),
    (1.0, 0.5),
    (1.0, 1.0),
    (0.5, 1.0),
    (0.0, 1.0),
    (0.0, 0.5),
];

/// Pattern bit of the midpoint slot, printed as `bottom right top left`.
fn slot_bit(slot: usize) -> u8 {
    match slot {
        1 => 0b1000,
        3 => 0b0100,
        5 => 0b0010,
        7 => 0b0001,
        _ => 0,
    }
}

fn pattern_slots(pattern: u8) -> Vec<usize> {
    (0..8)
        .filter(|&s| s % 2 == 0 || pattern & slot_bit(s) != 0)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParentKey {
    /// Mid-edge nodes present: bits (bottom, right, top, left) from high to low.
    pub pattern: u8,
    pub nu_bits: u64,
    pub plane: Plane,
}

impl ParentKey {
    pub fn new(pattern: u8, nu: f64, plane: Plane) -> Self {
        Self {
            pattern,
            nu_bits: nu.to_bits(),
            plane,
        }
    }

    pub fn nu(&self) -> f64 {
        f64::from_bits(self.nu_bits)
    }

    /// Pattern as a 4-character bit string, e.g. `0100` for a right midpoint.
    pub fn pattern_string(&self) -> String {
        format!("{:04b}", self.pattern)
    }
}

/// Recognized quadtree cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareCell {
    pub pattern: u8,
    /// `perm[i]` is the parent index of local vertex `i`.
    pub perm: Vec<usize>,
    pub origin: Vec2,
    pub side: f64,
}

/// Recognizes axis-aligned squares with corners plus mid-edge vertices.
/// Returns `None` for any other polygon.
pub fn canonical_pattern(poly: &[Vec2]) -> Option<SquareCell> {
    let m = poly.len();
    if !(4..=8).contains(&m) {
        return None;
    }
    let lo = poly.iter().fold(Vec2::repeat(f64::INFINITY), |a, p| a.inf(p));
    let hi = poly.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
    let side = hi.x - lo.x;
    let tol = 1e-10 * side;
    if !(side > 0.0) || (hi.y - lo.y - side).abs() > tol {
        return None;
    }
    let mut slots = Vec::with_capacity(m);
    for p in poly {
        let slot = SLOTS.iter().position(|&(sx, sy)| {
            (lo.x + sx * side - p.x).abs() <= tol && (lo.y + sy * side - p.y).abs() <= tol
        })?;
        slots.push(slot);
    }
    let mut pattern = 0u8;
    for &s in &slots {
        pattern |= slot_bit(s);
    }
    let parent = pattern_slots(pattern);
    if parent.len() != m {
        return None;
    }
    // Local order must be a cyclic rotation of the parent order.
    let start = parent.iter().position(|&s| s == slots[0])?;
    let perm: Vec<usize> = (0..m).map(|i| (start + i) % m).collect();
    if perm.iter().zip(&slots).any(|(&k, &s)| parent[k] != s) {
        return None;
    }
    Some(SquareCell {
        pattern,
        perm,
        origin: lo,
        side,
    })
}

/// Unit-parameter matrices of one parent cell, in parent vertex order.
#[derive(Debug, Clone)]
pub struct ParentMatrices {
    pub kx: DMatrix<f64>,
    pub ky: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub k_el: DMatrix<f64>,
    pub c_el: DMatrix<f64>,
    pub load: DVector<f64>,
}

/// Unit square polygon of a pattern.
pub fn parent_polygon(pattern: u8) -> Vec<Vec2> {
    pattern_slots(pattern)
        .into_iter()
        .map(|s| Vec2::new(SLOTS[s].0, SLOTS[s].1))
        .collect()
}

impl ParentMatrices {
    pub fn compute(key: &ParentKey, formulation: Formulation) -> Result<Self, ElementError> {
        let s = element::shape_samples(&parent_polygon(key.pattern), formulation)?;
        let d = d_matrix(1.0, key.nu(), key.plane);
        Ok(Self {
            kx: element::conduction(&s, 1.0, 0.0, 1.0),
            ky: element::conduction(&s, 0.0, 1.0, 1.0),
            m: element::mass(&s, 1.0),
            k_el: element::elastic(&s, &d, 1.0),
            c_el: element::coupling(&s, &d, 1.0, 1.0),
            load: element::load(&s, 1.0),
        })
    }

    /// Matrices of a cell of side `side`, in parent vertex order.
    pub fn scaled(&self, side: f64, mat: &Material) -> ElementMatrices {
        let t = mat.thickness;
        let area = side * side;
        ElementMatrices {
            k_th: &self.kx * (t * mat.kx) + &self.ky * (t * mat.ky),
            m_th: &self.m * (mat.rho * mat.c * t * area),
            k_el: &self.k_el * (mat.e * t),
            c_el: &self.c_el * (mat.e * mat.alpha * mat.expansion_factor() * side * t),
            f_q: &self.load * (mat.source * t * area),
        }
    }
}

/// Reorders parent-ordered matrices to the local vertex order `perm`.
pub fn permute(parent: &ElementMatrices, perm: &[usize]) -> ElementMatrices {
    let m = perm.len();
    let k_th = DMatrix::from_fn(m, m, |i, j| parent.k_th[(perm[i], perm[j])]);
    let m_th = DMatrix::from_fn(m, m, |i, j| parent.m_th[(perm[i], perm[j])]);
    let k_el = DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        parent.k_el[(2 * perm[i / 2] + i % 2, 2 * perm[j / 2] + j % 2)]
    });
    let c_el = DMatrix::from_fn(2 * m, m, |i, j| parent.c_el[(2 * perm[i / 2] + i % 2, perm[j])]);
    let f_q = DVector::from_fn(m, |i, _| parent.f_q[perm[i]]);
    ElementMatrices {
        k_th,
        m_th,
        k_el,
        c_el,
        f_q,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

/// Thread-safe parent-matrix cache. One lookup per element.
#[derive(Debug)]
pub struct ParentCache {
    formulation: Formulation,
    map: RwLock<HashMap<ParentKey, Arc<ParentMatrices>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ParentCache {
    pub fn new(formulation: Formulation) -> Self {
        Self {
            formulation,
            map: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn parent(&self, key: &ParentKey) -> Result<Arc<ParentMatrices>, ElementError> {
        if let Some(p) = self.map.read().expect("cache lock poisoned").get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(p.clone());
        }
        let mut map = self.map.write().expect("cache lock poisoned");
        if let Some(p) = map.get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(p.clone());
        }
        let p = Arc::new(ParentMatrices::compute(key, self.formulation)?);
        map.insert(*key, p.clone());
        self.misses.fetch_add(1, Ordering::Relaxed);
        Ok(p)
    }

    /// Scaled matrices in local vertex order, or `None` if `poly` is not a
    /// quadtree cell.
    pub fn element_matrices(&self, poly: &[Vec2], mat: &Material) -> Result<Option<ElementMatrices>, ElementError> {
        let Some(cell) = canonical_pattern(poly) else {
            return Ok(None);
        };
        let key = ParentKey::new(cell.pattern, mat.nu, mat.plane);
        let parent = self.parent(&key)?;
        Ok(Some(permute(&parent.scaled(cell.side, mat), &cell.perm)))
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            entries: self.map.read().expect("cache lock poisoned").len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_square_and_right_midpoint() {
        let sq = parent_polygon(0);
        let c = canonical_pattern(&sq).unwrap();
        assert_eq!(c.pattern, 0);
        assert_eq!(c.perm, vec![0, 1, 2, 3]);
        let pent = vec![
            Vec2::new(2.0, 2.0),
            Vec2::new(2.5, 2.0),
            Vec2::new(2.5, 2.25),
            Vec2::new(2.5, 2.5),
            Vec2::new(2.0, 2.5),
        ];
        let c = canonical_pattern(&pent).unwrap();
        assert_eq!(ParentKey::new(c.pattern, 0.0, Plane::Stress).pattern_string(), "0100");
        assert_eq!(c.side, 0.5);
        // Rotated start vertex.
        let rot: Vec<Vec2> = pent[2..].iter().chain(&pent[..2]).copied().collect();
        assert_eq!(canonical_pattern(&rot).unwrap().perm, vec![2, 3, 4, 0, 1]);
    }

    #[test]
    fn hexagon_is_not_square() {
        let hex: Vec<Vec2> = (0..6)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_3 * k as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        assert!(canonical_pattern(&hex).is_none());
        let rect = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(canonical_pattern(&rect).is_none());
    }

    #[test]
    fn fresh_cache_stats() {
        let c = ParentCache::new(Formulation::default());
        assert_eq!(c.stats(), CacheStats::default());
    }
}
