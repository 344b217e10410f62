//! Dirichlet conditions by elimination of constrained rows and columns.

use std::collections::BTreeMap;

use super::sparse::CsrMatrix;

/// Partition of the dofs of one square system into free and prescribed.
#[derive(Debug, Clone)]
pub struct Elimination {
    n: usize,
    /// Full index of each free dof.
    pub free: Vec<usize>,
    /// Prescribed dofs and values, sorted by dof.
    pub fixed: Vec<(usize, f64)>,
    /// Free-free block.
    pub reduced: CsrMatrix,
    /// Free-fixed block (columns indexed like `fixed`).
    coupling: CsrMatrix,
}

impl Elimination {
    pub fn new(k: &CsrMatrix, fixed: &BTreeMap<usize, f64>) -> Self {
        assert_eq!(k.nrows, k.ncols);
        let n = k.nrows;
        let mut map = vec![usize::MAX; n];
        let mut fixed_pos = vec![usize::MAX; n];
        let fixed_list: Vec<(usize, f64)> = fixed.iter().map(|(&d, &v)| (d, v)).collect();
        for (p, (d, _)) in fixed_list.iter().enumerate() {
            fixed_pos[*d] = p;
        }
        let mut free = Vec::with_capacity(n - fixed_list.len());
        for d in 0..n {
            if fixed_pos[d] == usize::MAX {
                map[d] = free.len();
                free.push(d);
            }
        }
        let mut rows_ff = Vec::with_capacity(free.len());
        let mut rows_fc = Vec::with_capacity(free.len());
        let mut vals_ff = Vec::new();
        let mut vals_fc = Vec::new();
        for &d in &free {
            let (cols, vals) = k.row(d);
            let mut rf = Vec::new();
            let mut rc = Vec::new();
            for (&j, &v) in cols.iter().zip(vals) {
                if map[j] != usize::MAX {
                    rf.push(map[j]);
                    vals_ff.push(v);
                } else {
                    rc.push((fixed_pos[j], v));
                }
            }
            rc.sort_unstable_by_key(|x| x.0);
            vals_fc.extend(rc.iter().map(|x| x.1));
            rows_fc.push(rc.into_iter().map(|x| x.0).collect::<Vec<_>>());
            rows_ff.push(rf);
        }
        // Free indices are increasing in full order, so rows stay sorted.
        let mut reduced = CsrMatrix::from_pattern(free.len(), &rows_ff);
        reduced.values = vals_ff;
        let mut coupling = CsrMatrix::from_pattern(fixed_list.len(), &rows_fc);
        coupling.values = vals_fc;
        Self {
            n,
            free,
            fixed: fixed_list,
            reduced,
            coupling,
        }
    }

    pub fn n_full(&self) -> usize {
        self.n
    }

    /// Right-hand side of the reduced system: `f_free - K_fc * u_fixed`.
    pub fn reduce_rhs(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n);
        let values: Vec<f64> = self.fixed.iter().map(|x| x.1).collect();
        let shift = self.coupling.mul_vec(&values);
        self.free.iter().zip(shift).map(|(&d, s)| f[d] - s).collect()
    }

    /// Full vector from reduced unknowns plus prescribed values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.free.len());
        let mut full = vec![0.0; self.n];
        for (&d, &v) in self.free.iter().zip(x) {
            full[d] = v;
        }
        for &(d, v) in &self.fixed {
            full[d] = v;
        }
        full
    }
}

/// Reduced matrix and right-hand side, with the map back to full vectors.
pub fn apply_dirichlet(k: &CsrMatrix, f: &[f64], fixed: &BTreeMap<usize, f64>) -> (Elimination, Vec<f64>) {
    let e = Elimination::new(k, fixed);
    let rhs = e.reduce_rhs(f);
    (e, rhs)
}
