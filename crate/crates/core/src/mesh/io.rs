//! JSON mesh files.
//!
//! ```text
//! {
//!   "nodes": [[x, y], ...],
//!   "elements": [{"nodes": [i0, i1, ...], "material": 0}, ...],
//!   "node_sets": {"name": [i, ...]},
//!   "edge_sets": {"name": [[a, b], ...]}
//! }
//! ```
//!
//! Indices are 0-based and element vertices must be counter-clockwise.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{validate, Mesh, MeshError, PolyElement, ValidationReport, Violation};
use crate::geom::Vec2;

const SECTIONS: [&str; 4] = ["nodes", "elements", "node_sets", "edge_sets"];

#[derive(Serialize, Deserialize)]
struct ElementRecord {
    nodes: Vec<usize>,
    #[serde(default)]
    material: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    nodes: Option<Vec<[f64; 2]>>,
    elements: Option<Vec<ElementRecord>>,
    #[serde(default)]
    node_sets: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    edge_sets: BTreeMap<String, Vec<[usize; 2]>>,
}

pub fn mesh_to_json(mesh: &Mesh) -> String {
    let file = MeshFile {
        nodes: Some(mesh.nodes.iter().map(|p| [p.x, p.y]).collect()),
        elements: Some(
            mesh.elements
                .iter()
                .map(|e| ElementRecord {
                    nodes: e.nodes.clone(),
                    material: e.material,
                })
                .collect(),
        ),
        node_sets: mesh.node_sets.clone(),
        edge_sets: mesh.edge_sets.clone(),
    };
    serde_json::to_string(&file).expect("mesh serialization cannot fail")
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path, mesh_to_json(mesh))?;
    Ok(())
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    mesh_from_json(&std::fs::read_to_string(path)?)
}

/// Parses a mesh document. Rejects clockwise elements and out-of-range ids;
/// other invariant violations are left to [`validate`].
pub fn mesh_from_json(text: &str) -> Result<Mesh, MeshError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: MeshFile = match serde_path_to_error::deserialize(de) {
        Ok(f) => f,
        Err(err) => {
            let path = err.path().to_string();
            let inner = err.into_inner();
            if inner.classify() == serde_json::error::Category::Eof {
                let complete = complete_top_level_keys(text);
                let missing: Vec<&str> = SECTIONS
                    .iter()
                    .copied()
                    .filter(|s| !complete.iter().any(|k| k == s))
                    .collect();
                return Err(MeshError::Truncated {
                    line: inner.line(),
                    column: inner.column(),
                    missing: missing.join(", "),
                });
            }
            if inner.classify() == serde_json::error::Category::Data && path != "." {
                return Err(MeshError::Field {
                    field: path,
                    message: format!("{inner}"),
                });
            }
            return Err(MeshError::Parse {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            });
        }
    };
    let nodes = file
        .nodes
        .ok_or_else(|| MeshError::MissingSection("nodes".into()))?;
    let elements = file
        .elements
        .ok_or_else(|| MeshError::MissingSection("elements".into()))?;
    let mesh = Mesh {
        nodes: nodes.into_iter().map(|[x, y]| Vec2::new(x, y)).collect(),
        elements: elements
            .into_iter()
            .map(|r| PolyElement::new(r.nodes, r.material))
            .collect(),
        node_sets: file.node_sets,
        edge_sets: file.edge_sets,
    };
    let report = validate(&mesh);
    let fatal: Vec<Violation> = report
        .violations
        .into_iter()
        .filter(|v| {
            matches!(
                v,
                Violation::ClockwiseWinding { .. }
                    | Violation::DanglingId { .. }
                    | Violation::DanglingSetId { .. }
                    | Violation::NonFiniteNode { .. }
            )
        })
        .collect();
    if !fatal.is_empty() {
        return Err(MeshError::Invalid(ValidationReport { violations: fatal }));
    }
    Ok(mesh)
}

/// Top-level object keys whose values were completely read before the text
/// ended.
fn complete_top_level_keys(text: &str) -> Vec<String> {
    let mut keys = Vec::new();
    let mut depth = 0i32;
    let mut in_string = false;
    let mut escaped = false;
    let mut current = String::new();
    let mut last_string = String::new();
    let mut open_key: Option<String> = None;
    for ch in text.chars() {
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
                last_string = std::mem::take(&mut current);
            } else {
                current.push(ch);
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            ':' if depth == 1 => open_key = Some(last_string.clone()),
            '{' | '[' => depth += 1,
            '}' | ']' => {
                depth -= 1;
                if depth == 1 {
                    if let Some(k) = open_key.take() {
                        keys.push(k);
                    }
                }
                if depth == 0 {
                    if let Some(k) = open_key.take() {
                        keys.push(k);
                    }
                }
            }
            ',' if depth == 1 => {
                if let Some(k) = open_key.take() {
                    keys.push(k);
                }
            }
            _ => {}
        }
    }
    keys
}
