//! Polygonal finite elements with Wachspress shape functions for steady and
//! transient thermal-stress analysis in 2D, with parent-element matrix reuse
//! on quadtree meshes.

pub mod accel;
pub mod element;
pub mod export;
pub mod geom;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod verify;
pub mod wachspress;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error(transparent)]
    Shape(#[from] wachspress::WachspressError),
    #[error(transparent)]
    Element(#[from] element::ElementError),
    #[error(transparent)]
    Solve(#[from] solver::SolveError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
