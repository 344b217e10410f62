//! Uniform bucket grid for nearest-point queries over planar point sets.

use crate::geom::Vec2;

#[derive(Debug, Clone)]
pub(crate) struct PointGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl PointGrid {
    /// Buckets `points` with roughly `per_cell` points per bucket.
    pub fn new(points: &[Vec2], per_cell: f64) -> Self {
        let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
        for p in points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if points.is_empty() {
            lo = Vec2::zeros();
            hi = Vec2::repeat(1.0);
        }
        let span = (hi - lo).map(|v| v.max(1e-300));
        let area = span.x * span.y;
        let n = points.len().max(1) as f64;
        let mut cell = (area * per_cell / n).sqrt();
        if !(cell > 0.0) || !cell.is_finite() {
            cell = span.x.max(span.y);
        }
        cell = cell.max(span.x.max(span.y) / 4096.0);
        Self::with_cell(points, lo, hi, cell)
    }

    pub fn with_cell(points: &[Vec2], lo: Vec2, hi: Vec2, cell: f64) -> Self {
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (i, p) in points.iter().enumerate() {
            let b = grid.bucket_of(p);
            grid.buckets[b].push(i);
        }
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn coords(&self, p: &Vec2) -> (isize, isize) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as isize,
            ((p.y - self.origin.y) / self.cell).floor() as isize,
        )
    }

    fn bucket_of(&self, p: &Vec2) -> usize {
        let (i, j) = self.coords(p);
        let i = i.clamp(0, self.nx as isize - 1) as usize;
        let j = j.clamp(0, self.ny as isize - 1) as usize;
        j * self.nx + i
    }

    /// Indices stored in buckets that intersect the box `[lo, hi]`.
    pub fn query_box(&self, lo: &Vec2, hi: &Vec2, out: &mut Vec<usize>) {
        let (i0, j0) = self.coords(lo);
        let (i1, j1) = self.coords(hi);
        let i0 = i0.clamp(0, self.nx as isize - 1) as usize;
        let j0 = j0.clamp(0, self.ny as isize - 1) as usize;
        let i1 = i1.clamp(0, self.nx as isize - 1) as usize;
        let j1 = j1.clamp(0, self.ny as isize - 1) as usize;
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend_from_slice(&self.buckets[j * self.nx + i]);
            }
        }
    }

    /// Indices in the square ring of buckets at Chebyshev distance `ring`
    /// from the bucket containing `p`. Returns false once the ring lies
    /// completely outside the grid.
    pub fn query_ring(&self, p: &Vec2, ring: usize, out: &mut Vec<usize>) -> bool {
        let (ci, cj) = self.coords(p);
        let ci = ci.clamp(0, self.nx as isize - 1);
        let cj = cj.clamp(0, self.ny as isize - 1);
        let r = ring as isize;
        let mut any = false;
        for j in (cj - r)..=(cj + r) {
            if j < 0 || j >= self.ny as isize {
                continue;
            }
            for i in (ci - r)..=(ci + r) {
                if i < 0 || i >= self.nx as isize {
                    continue;
                }
                if (i - ci).abs() != r && (j - cj).abs() != r {
                    continue;
                }
                any = true;
                out.extend_from_slice(&self.buckets[j as usize * self.nx + i as usize]);
            }
        }
        any
    }
}
