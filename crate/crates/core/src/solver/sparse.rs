//! Compressed sparse row matrices with sorted column indices.

use nalgebra::DMatrix;

use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given sorted, duplicate-free row patterns.
    pub fn from_pattern(ncols: usize, rows: &[Vec<usize>]) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self {
            nrows: rows.len(),
            ncols,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    /// Sums duplicate entries.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        let mut a = Self::from_pattern(ncols, &rows);
        for &(i, j, v) in triplets {
            a.add(i, j, v);
        }
        a
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>())
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    /// Adds `v` at `(i, j)`; the entry must be in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is outside the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, a)| a * x[j]).sum()
            })
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// `a * self + b * other` for matrices sharing one pattern.
    pub fn linear_combination(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert!(self.row_ptr == other.row_ptr && self.col_idx == other.col_idx);
        let mut out = self.clone();
        for (o, (x, y)) in out.values.iter_mut().zip(self.values.iter().zip(&other.values)) {
            *o = a * x + b * y;
        }
        out
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, a) in c.iter().zip(v) {
                worst = worst.max((a - self.get(j, i)).abs());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, a) in c.iter().zip(v) {
                d[(i, j)] += a;
            }
        }
        d
    }
}

/// Sorted node adjacency (including the node itself) through shared elements.
pub fn node_graph(mesh: &Mesh) -> Vec<Vec<usize>> {
    let mut rows = vec![Vec::new(); mesh.n_nodes()];
    for el in &mesh.elements {
        for &a in &el.nodes {
            rows[a].extend_from_slice(&el.nodes);
        }
    }
    for (i, r) in rows.iter_mut().enumerate() {
        r.push(i);
        r.sort_unstable();
        r.dedup();
    }
    rows
}

/// Scalar (one dof per node) pattern.
pub fn scalar_pattern(graph: &[Vec<usize>]) -> CsrMatrix {
    CsrMatrix::from_pattern(graph.len(), graph)
}

/// Two interleaved dofs per node.
pub fn block_pattern(graph: &[Vec<usize>]) -> CsrMatrix {
    let rows: Vec<Vec<usize>> = graph
        .iter()
        .flat_map(|r| {
            let row: Vec<usize> = r.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect();
            [row.clone(), row]
        })
        .collect();
    CsrMatrix::from_pattern(2 * graph.len(), &rows)
}

/// Rows of displacement dofs, columns of nodal temperatures.
pub fn coupling_pattern(graph: &[Vec<usize>]) -> CsrMatrix {
    let rows: Vec<Vec<usize>> = graph.iter().flat_map(|r| [r.clone(), r.clone()]).collect();
    CsrMatrix::from_pattern(graph.len(), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_and_products() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (0, 0, 2.0), (1, 1, 3.0), (0, 2, 1.0)]);
        assert_eq!(a.col_idx, vec![0, 2, 1]);
        assert_eq!(a.get(0, 2), 2.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![4.0, 3.0]);
    }

    #[test]
    #[should_panic(expected = "outside the sparsity pattern")]
    fn add_outside_pattern_panics() {
        let mut a = CsrMatrix::identity(2);
        a.add(0, 1, 1.0);
    }

    #[test]
    fn patterns_of_two_quads() {
        let m = crate::mesh::gen_structured_quads(2.0, 1.0, 2, 1).unwrap();
        let g = node_graph(&m);
        assert_eq!(g[0], vec![0, 1, 3, 4]);
        assert_eq!(g[1].len(), 6);
        let b = block_pattern(&g);
        assert_eq!(b.nrows, 12);
        assert_eq!(b.row(2).0.len(), 12);
        let c = coupling_pattern(&g);
        assert_eq!((c.nrows, c.ncols), (12, 6));
    }
}
