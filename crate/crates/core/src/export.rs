//! Legacy ASCII VTK output. Every element is written as a polygon (type 7).

use std::io::{self, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::mesh::Mesh;
use crate::solver::FieldState;

pub const VTK_POLYGON: u8 = 7;

/// Writes nodal `temperature` and `displacement` and, when given, per-element
/// `stress` (xx, yy, xy).
pub fn write_vtk<W: Write>(
    mut out: W,
    title: &str,
    mesh: &Mesh,
    state: &FieldState,
    stress: Option<&[Vector3<f64>]>,
) -> io::Result<()> {
    let n = mesh.n_nodes();
    let ne = mesh.n_elements();
    assert_eq!(state.phi.len(), n, "temperature length");
    assert_eq!(state.u.len(), 2 * n, "displacement length");
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for p in &mesh.nodes {
        writeln!(out, "{:e} {:e} 0", p.x, p.y)?;
    }
    let size: usize = mesh.elements.iter().map(|e| e.nodes.len() + 1).sum();
    writeln!(out, "CELLS {ne} {size}")?;
    for e in &mesh.elements {
        write!(out, "{}", e.nodes.len())?;
        for v in &e.nodes {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(out, "{VTK_POLYGON}")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    writeln!(out, "SCALARS temperature double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for t in &state.phi {
        writeln!(out, "{t:e}")?;
    }
    writeln!(out, "VECTORS displacement double")?;
    for u in state.u.chunks(2) {
        writeln!(out, "{:e} {:e} 0", u[0], u[1])?;
    }
    if let Some(s) = stress {
        assert_eq!(s.len(), ne, "stress length");
        writeln!(out, "CELL_DATA {ne}")?;
        writeln!(out, "SCALARS stress double 3")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in s {
            writeln!(out, "{:e} {:e} {:e}", v[0], v[1], v[2])?;
        }
    }
    out.flush()
}

pub fn write_vtk_file(
    path: impl AsRef<Path>,
    title: &str,
    mesh: &Mesh,
    state: &FieldState,
    stress: Option<&[Vector3<f64>]>,
) -> io::Result<()> {
    let f = io::BufWriter::new(std::fs::File::create(path)?);
    write_vtk(f, title, mesh, state, stress)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gen_structured_quads;

    #[test]
    fn sections_and_counts() {
        let m = gen_structured_quads(1.0, 1.0, 2, 1).unwrap();
        let state = FieldState {
            t: 0.0,
            phi: vec![1.0; 6],
            u: vec![0.5; 12],
        };
        let mut buf = Vec::new();
        write_vtk(&mut buf, "two quads", &m, &state, Some(&[Vector3::zeros(); 2])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[3], "DATASET UNSTRUCTURED_GRID");
        assert!(text.contains("POINTS 6 double"));
        assert!(text.contains("CELLS 2 10"));
        assert!(text.contains("CELL_TYPES 2\n7\n7\n"));
        assert!(text.contains("SCALARS temperature double 1"));
        assert!(text.contains("VECTORS displacement double"));
        assert!(text.contains("CELL_DATA 2"));
    }
}
