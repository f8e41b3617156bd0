//! Triangulated-sphere export for the degree-2 skeleton.
//!
//! For d = 2 the skeleton's eight 2-cells realize inside ℝ³: a 2-cell
//! X(a,b,c) carries the points (±√p₀, ±√p₁, ±√p₂) with barycentric weights
//! p summing to 1, which is exactly one closed octant of the unit sphere.
//! [`triangulate_octants`] subdivides each octant into `resolution`²
//! triangles on the barycentric lattice and glues shared boundary vertices
//! exactly (integer lattice keys, no floating-point comparisons), so vertex
//! counts match the closed-surface count 4·resolution² + 2. At resolution 1
//! the mesh is the inscribed octahedron.

use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum MeshError {
    #[error("resolution must be at least 1")]
    InvalidResolution,
}

/// A triangle mesh with one owning 2-cell label per face.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshDocument {
    pub vertices: Vec<[f64; 3]>,
    /// Vertex index triples, 0-based.
    pub faces: Vec<[usize; 3]>,
    /// The skeleton 2-cell each face subdivides, parallel to `faces`.
    pub face_labels: Vec<String>,
}

/// Exact identity of a lattice vertex: per coordinate the numerator i of
/// the weight i/R together with the coordinate sign, with the sign of a
/// zero coordinate normalized away so octants share boundary vertices.
type LatticeKey = [(u32, i8); 3];

fn lattice_key(numerators: [u32; 3], signs: [i8; 3]) -> LatticeKey {
    [0, 1, 2].map(|i| {
        let s = if numerators[i] == 0 { 1 } else { signs[i] };
        (numerators[i], s)
    })
}

fn vertex_position(numerators: [u32; 3], signs: [i8; 3], resolution: u32) -> [f64; 3] {
    [0, 1, 2].map(|i| {
        let weight = numerators[i] as f64 / resolution as f64;
        // +0.0 keeps zero coordinates free of negative-zero artifacts.
        signs[i] as f64 * weight.sqrt() + 0.0
    })
}

/// Subdivides the eight octant 2-cells of the degree-2 skeleton into
/// `resolution`² triangles each, sharing boundary vertices exactly.
pub fn triangulate_octants(resolution: u32) -> Result<MeshDocument, MeshError> {
    if resolution == 0 {
        return Err(MeshError::InvalidResolution);
    }
    let r = resolution;
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut seen: HashMap<LatticeKey, usize> = HashMap::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut face_labels: Vec<String> = Vec::new();

    // Octants in the 2-cell index order X(a,b,c), residue 1 meaning the
    // negative root ray.
    for a in 0..2u32 {
        for b in 0..2u32 {
            for c in 0..2u32 {
                let signs = [a, b, c].map(|res| if res == 0 { 1i8 } else { -1i8 });
                let label = format!("X({a},{b},{c})");
                let mut vertex_at = |i: u32, j: u32| -> usize {
                    let numerators = [i, j, r - i - j];
                    let key = lattice_key(numerators, signs);
                    *seen.entry(key).or_insert_with(|| {
                        vertices.push(vertex_position(numerators, signs, r));
                        vertices.len() - 1
                    })
                };
                for i in 0..r {
                    for j in 0..(r - i) {
                        let up = [vertex_at(i, j), vertex_at(i + 1, j), vertex_at(i, j + 1)];
                        faces.push(up);
                        face_labels.push(label.clone());
                        if j + 1 < r - i {
                            let down = [
                                vertex_at(i + 1, j),
                                vertex_at(i + 1, j + 1),
                                vertex_at(i, j + 1),
                            ];
                            faces.push(down);
                            face_labels.push(label.clone());
                        }
                    }
                }
            }
        }
    }

    Ok(MeshDocument { vertices, faces, face_labels })
}

impl MeshDocument {
    /// Renders the mesh as OBJ-style text: `v x y z` lines, `g` group lines
    /// naming the owning 2-cell, and 1-based `f i j k` lines.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2]).expect("string write");
        }
        let mut current_group: Option<&str> = None;
        for (face, label) in self.faces.iter().zip(&self.face_labels) {
            if current_group != Some(label.as_str()) {
                writeln!(out, "g {label}").expect("string write");
                current_group = Some(label);
            }
            writeln!(out, "f {} {} {}", face[0] + 1, face[1] + 1, face[2] + 1)
                .expect("string write");
        }
        out
    }
}
