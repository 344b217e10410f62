use super::{Mesh, MeshError, PolyElement};
use crate::geom::{Rect, Vec2};

/// Structured grid of `nx * ny` counter-clockwise quadrilaterals on
/// `[0, width] x [0, height]`, with `left`/`right`/`bottom`/`top` sets.
pub fn gen_structured_quads(width: f64, height: f64, nx: usize, ny: usize) -> Result<Mesh, MeshError> {
    structured_in(Rect::new(0.0, 0.0, width, height), nx, ny)
}

pub(crate) fn structured_in(rect: Rect, nx: usize, ny: usize) -> Result<Mesh, MeshError> {
    if !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(MeshError::Parameter(format!(
            "dimensions must be positive, got {} x {}",
            rect.width(),
            rect.height()
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(MeshError::Parameter("nx and ny must be at least 1".into()));
    }
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = rect.y0 + rect.height() * j as f64 / ny as f64;
        for i in 0..=nx {
            let x = rect.x0 + rect.width() * i as f64 / nx as f64;
            nodes.push(Vec2::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push(PolyElement::new(
                vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
                0,
            ));
        }
    }
    let mut mesh = Mesh::new(nodes, elements);
    mesh.add_rect_sides(&rect);
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate;

    #[test]
    fn counts() {
        let m = gen_structured_quads(5.0, 1.0, 20, 4).unwrap();
        assert_eq!(m.n_nodes(), 105);
        assert_eq!(m.n_elements(), 80);
        assert!(validate(&m).is_valid());
        let m = gen_structured_quads(1.0, 1.0, 1, 1).unwrap();
        assert_eq!((m.n_nodes(), m.n_elements()), (4, 1));
        let m = gen_structured_quads(2.0, 1.0, 2, 1).unwrap();
        assert_eq!(m.edge_sets["left"].len(), 1);
        assert_eq!(m.edge_sets["bottom"].len(), 2);
        assert_eq!(m.node_sets["left"], vec![0, 3]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(gen_structured_quads(0.0, 1.0, 1, 1).is_err());
        assert!(gen_structured_quads(1.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn area_sums_to_domain() {
        let m = gen_structured_quads(5.0, 1.0, 37, 11).unwrap();
        assert!((m.total_area() - 5.0).abs() <= 1e-10 * 5.0);
    }
}
