//! Cell inventories for the skeleta of the affine and projective Fermat
//! surface complements.
//!
//! The degree-d affine surface x^d + y^d + z^d = 1 retracts onto a compact
//! 2-complex whose cells are indexed by tuples of d-th roots of unity, stored
//! here as residues mod d:
//!
//! * 2-cells `X(a,b,c)`: all coordinates nonzero, coordinate rays
//!   (ζ^a, ζ^b, ζ^c);
//! * edges `Lx(b,c)`, `Ly(a,c)`, `Lz(a,b)`: one coordinate vanishes (the one
//!   named by the letter);
//! * vertices `Vx(a)`, `Vy(b)`, `Vz(c)`: two coordinates vanish.
//!
//! The projective complement quotients by the diagonal scaling action of the
//! d-th roots of unity; canonical representatives have first stored residue
//! zero. [`build_affine`] and [`build_projective`] assemble the labelled
//! Δ-complexes, [`realize`] embeds a labelled cell back into C³, and
//! [`locate`] inverts it.

use crate::delta::{CellId, CellLabels, DeltaComplex};
use crate::retraction::ComplexTriple;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use thiserror::Error;

/// Barycentric-weight tolerance used by [`realize`].
const REALIZE_TOL: f64 = 1e-9;

#[derive(Error, Debug)]
pub enum FermatError {
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("residue {value} out of range for degree {degree}")]
    RootOutOfRange { value: u32, degree: u32 },
    #[error("barycentric weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("barycentric weight at position {position} is negative ({value})")]
    NegativeWeight { position: usize, value: f64 },
    #[error("cell omits coordinate {position} but its weight is {value}")]
    WeightOffCell { position: usize, value: f64 },
    #[error("point is not on the degree-{degree} skeleton: {reason}")]
    NotOnSkeleton { degree: u32, reason: String },
}

fn check_degree(d: u32) -> Result<(), FermatError> {
    if d == 0 {
        return Err(FermatError::InvalidDegree);
    }
    Ok(())
}

fn check_residue(value: u32, degree: u32) -> Result<(), FermatError> {
    if value >= degree {
        return Err(FermatError::RootOutOfRange { value, degree });
    }
    Ok(())
}

/// An element of the group μ_d³ of coordinate-wise root-of-unity scalings,
/// stored as exponent residues mod the degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnityTuple {
    pub degree: u32,
    pub exponents: [u32; 3],
}

impl UnityTuple {
    pub fn new(degree: u32, exponents: [u32; 3]) -> Result<Self, FermatError> {
        check_degree(degree)?;
        for &e in &exponents {
            check_residue(e, degree)?;
        }
        Ok(UnityTuple { degree, exponents })
    }

    pub fn identity(degree: u32) -> Self {
        UnityTuple { degree, exponents: [0, 0, 0] }
    }

    /// The diagonal element (j, j, j), the generator pattern of the subgroup
    /// that acts trivially on the projective quotient.
    pub fn diagonal(degree: u32, j: u32) -> Result<Self, FermatError> {
        check_degree(degree)?;
        check_residue(j, degree)?;
        Ok(UnityTuple { degree, exponents: [j, j, j] })
    }

    pub fn compose(&self, other: &UnityTuple) -> UnityTuple {
        assert_eq!(self.degree, other.degree, "degree mismatch in compose");
        let d = self.degree;
        let e = [0, 1, 2].map(|i| (self.exponents[i] + other.exponents[i]) % d);
        UnityTuple { degree: d, exponents: e }
    }

    pub fn is_diagonal(&self) -> bool {
        self.exponents[0] == self.exponents[1] && self.exponents[1] == self.exponents[2]
    }
}

/// The seven cell shapes of the skeleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    X,
    Lx,
    Ly,
    Lz,
    Vx,
    Vy,
    Vz,
}

impl CellKind {
    pub fn dim(&self) -> u8 {
        match self {
            CellKind::X => 2,
            CellKind::Lx | CellKind::Ly | CellKind::Lz => 1,
            CellKind::Vx | CellKind::Vy | CellKind::Vz => 0,
        }
    }

    /// The coordinate positions (0 = x, 1 = y, 2 = z) that are nonzero on
    /// the cell, i.e. the positions whose residues the label stores.
    pub fn stored_positions(&self) -> &'static [usize] {
        match self {
            CellKind::X => &[0, 1, 2],
            CellKind::Lx => &[1, 2],
            CellKind::Ly => &[0, 2],
            CellKind::Lz => &[0, 1],
            CellKind::Vx => &[0],
            CellKind::Vy => &[1],
            CellKind::Vz => &[2],
        }
    }

    pub fn arity(&self) -> usize {
        self.stored_positions().len()
    }

    pub fn name(&self) -> &'static str {
        match self {
            CellKind::X => "X",
            CellKind::Lx => "Lx",
            CellKind::Ly => "Ly",
            CellKind::Lz => "Lz",
            CellKind::Vx => "Vx",
            CellKind::Vy => "Vy",
            CellKind::Vz => "Vz",
        }
    }

    pub fn from_name(name: &str) -> Option<CellKind> {
        match name {
            "X" => Some(CellKind::X),
            "Lx" => Some(CellKind::Lx),
            "Ly" => Some(CellKind::Ly),
            "Lz" => Some(CellKind::Lz),
            "Vx" => Some(CellKind::Vx),
            "Vy" => Some(CellKind::Vy),
            "Vz" => Some(CellKind::Vz),
            _ => None,
        }
    }
}

/// A labelled cell of the affine skeleton. `roots[i]` is the residue of the
/// root of unity on coordinate i; positions the cell omits stay zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffineCellLabel {
    pub kind: CellKind,
    pub degree: u32,
    pub roots: [u32; 3],
}

impl AffineCellLabel {
    /// Builds a label from the stored residues in position order, checking
    /// ranges. `stored` must have exactly `kind.arity()` entries.
    pub fn new(kind: CellKind, degree: u32, stored: &[u32]) -> Result<Self, FermatError> {
        check_degree(degree)?;
        assert_eq!(
            stored.len(),
            kind.arity(),
            "{} takes {} residues",
            kind.name(),
            kind.arity()
        );
        let mut roots = [0u32; 3];
        for (&pos, &value) in kind.stored_positions().iter().zip(stored) {
            check_residue(value, degree)?;
            roots[pos] = value;
        }
        Ok(AffineCellLabel { kind, degree, roots })
    }

    pub fn face(degree: u32, a: u32, b: u32, c: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::X, degree, &[a, b, c])
    }

    pub fn edge_x(degree: u32, b: u32, c: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::Lx, degree, &[b, c])
    }

    pub fn edge_y(degree: u32, a: u32, c: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::Ly, degree, &[a, c])
    }

    pub fn edge_z(degree: u32, a: u32, b: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::Lz, degree, &[a, b])
    }

    pub fn vertex_x(degree: u32, a: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::Vx, degree, &[a])
    }

    pub fn vertex_y(degree: u32, b: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::Vy, degree, &[b])
    }

    pub fn vertex_z(degree: u32, c: u32) -> Result<Self, FermatError> {
        AffineCellLabel::new(CellKind::Vz, degree, &[c])
    }

    pub fn dim(&self) -> u8 {
        self.kind.dim()
    }

    /// The stored residues in position order.
    pub fn stored(&self) -> Vec<u32> {
        self.kind
            .stored_positions()
            .iter()
            .map(|&p| self.roots[p])
            .collect()
    }

    /// Face labels in slot order. A 2-cell `X(a,b,c)` has faces
    /// `[Lx(b,c), Ly(a,c), Lz(a,b)]`; an edge lists its two endpoint
    /// vertices starting with the one reached first along the edge's
    /// orientation; vertices have none.
    pub fn faces(&self) -> Vec<AffineCellLabel> {
        let d = self.degree;
        let [a, b, c] = self.roots;
        let build = |r: Result<AffineCellLabel, FermatError>| r.expect("in-range residues");
        match self.kind {
            CellKind::X => vec![
                build(AffineCellLabel::edge_x(d, b, c)),
                build(AffineCellLabel::edge_y(d, a, c)),
                build(AffineCellLabel::edge_z(d, a, b)),
            ],
            CellKind::Lx => vec![
                build(AffineCellLabel::vertex_y(d, b)),
                build(AffineCellLabel::vertex_z(d, c)),
            ],
            CellKind::Ly => vec![
                build(AffineCellLabel::vertex_x(d, a)),
                build(AffineCellLabel::vertex_z(d, c)),
            ],
            CellKind::Lz => vec![
                build(AffineCellLabel::vertex_x(d, a)),
                build(AffineCellLabel::vertex_y(d, b)),
            ],
            CellKind::Vx | CellKind::Vy | CellKind::Vz => vec![],
        }
    }
}

impl fmt::Display for AffineCellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind.name())?;
        for (i, r) in self.stored().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Applies a coordinate-wise root-of-unity scaling to a cell label.
pub fn act(g: &UnityTuple, cell: &AffineCellLabel) -> AffineCellLabel {
    assert_eq!(g.degree, cell.degree, "degree mismatch in act");
    let d = cell.degree;
    let mut roots = [0u32; 3];
    for &p in cell.kind.stored_positions() {
        roots[p] = (cell.roots[p] + g.exponents[p]) % d;
    }
    AffineCellLabel { kind: cell.kind, degree: d, roots }
}

/// A cell of the projective quotient, stored as the canonical affine
/// representative whose first stored residue is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProjectiveCellLabel(AffineCellLabel);

impl ProjectiveCellLabel {
    pub fn representative(&self) -> &AffineCellLabel {
        &self.0
    }
}

impl fmt::Display for ProjectiveCellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.0.kind.name())?;
        for (i, r) in self.0.stored().iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// Canonical representative of a cell's diagonal orbit: scales so the first
/// stored residue becomes zero.
pub fn canonical_projective(cell: &AffineCellLabel) -> ProjectiveCellLabel {
    let d = cell.degree;
    let first = cell.kind.stored_positions()[0];
    let shift = (d - cell.roots[first]) % d;
    let g = UnityTuple { degree: d, exponents: [shift; 3] };
    ProjectiveCellLabel(act(&g, cell))
}

/// The diagonal orbit of a cell, starting from the cell itself.
pub fn diagonal_orbit(cell: &AffineCellLabel) -> Vec<AffineCellLabel> {
    let d = cell.degree;
    (0..d)
        .map(|j| {
            let g = UnityTuple { degree: d, exponents: [j; 3] };
            act(&g, cell)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Affine,
    Projective,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Affine => write!(f, "affine"),
            Space::Projective => write!(f, "projective"),
        }
    }
}

/// A built skeleton: the underlying Δ-complex plus the cell labelling in
/// both directions.
#[derive(Clone, Debug)]
pub struct FermatComplex {
    pub degree: u32,
    pub space: Space,
    pub complex: DeltaComplex,
    /// Labels per dimension, in cell index order.
    pub labels: [Vec<AffineCellLabel>; 3],
    index: HashMap<AffineCellLabel, CellId>,
}

impl FermatComplex {
    pub(crate) fn from_parts(
        degree: u32,
        space: Space,
        complex: DeltaComplex,
        labels: [Vec<AffineCellLabel>; 3],
    ) -> Self {
        let mut index = HashMap::new();
        for (dim, level) in labels.iter().enumerate() {
            for (i, label) in level.iter().enumerate() {
                let prev = index.insert(*label, CellId { dim: dim as u8, index: i });
                assert!(prev.is_none(), "duplicate label {label}");
            }
        }
        FermatComplex { degree, space, complex, labels, index }
    }

    /// Looks up the cell carrying a label. Projective complexes accept any
    /// affine representative and canonicalize it first.
    pub fn cell_id(&self, label: &AffineCellLabel) -> Option<CellId> {
        let key = match self.space {
            Space::Affine => *label,
            Space::Projective => *canonical_projective(label).representative(),
        };
        self.index.get(&key).copied()
    }

    pub fn label_of(&self, id: CellId) -> Option<&AffineCellLabel> {
        self.labels.get(id.dim as usize)?.get(id.index)
    }

    pub fn cell_count(&self, dim: u8) -> usize {
        self.labels[dim as usize].len()
    }
}

fn labels_to_strings(labels: &[Vec<AffineCellLabel>; 3], space: Space) -> CellLabels {
    let to_string = |l: &AffineCellLabel| match space {
        Space::Affine => l.to_string(),
        Space::Projective => canonical_projective(l).to_string(),
    };
    CellLabels {
        vertices: labels[0].iter().map(to_string).collect(),
        edges: labels[1].iter().map(to_string).collect(),
        faces: labels[2].iter().map(to_string).collect(),
    }
}

/// Builds the skeleton of the affine degree-d surface complement:
/// 3d vertices, 3d² edges, d³ triangles.
pub fn build_affine(d: u32) -> Result<FermatComplex, FermatError> {
    check_degree(d)?;
    let du = d as usize;
    let dd = du * du;

    let mut vertices = Vec::with_capacity(3 * du);
    for a in 0..d {
        vertices.push(AffineCellLabel::vertex_x(d, a)?);
    }
    for b in 0..d {
        vertices.push(AffineCellLabel::vertex_y(d, b)?);
    }
    for c in 0..d {
        vertices.push(AffineCellLabel::vertex_z(d, c)?);
    }

    // Vertex indices: Vx(a) -> a, Vy(b) -> d + b, Vz(c) -> 2d + c.
    let vx = |a: u32| a as usize;
    let vy = |b: u32| du + b as usize;
    let vz = |c: u32| 2 * du + c as usize;

    let mut edges = Vec::with_capacity(3 * dd);
    let mut face1 = Vec::with_capacity(3 * dd);
    for b in 0..d {
        for c in 0..d {
            edges.push(AffineCellLabel::edge_x(d, b, c)?);
            face1.push([vy(b), vz(c)]);
        }
    }
    for a in 0..d {
        for c in 0..d {
            edges.push(AffineCellLabel::edge_y(d, a, c)?);
            face1.push([vx(a), vz(c)]);
        }
    }
    for a in 0..d {
        for b in 0..d {
            edges.push(AffineCellLabel::edge_z(d, a, b)?);
            face1.push([vx(a), vy(b)]);
        }
    }

    // Edge indices: Lx(b,c) -> b·d + c, Ly(a,c) -> d² + a·d + c,
    // Lz(a,b) -> 2d² + a·d + b.
    let lx = |b: u32, c: u32| b as usize * du + c as usize;
    let ly = |a: u32, c: u32| dd + a as usize * du + c as usize;
    let lz = |a: u32, b: u32| 2 * dd + a as usize * du + b as usize;

    let mut faces = Vec::with_capacity(du * dd);
    let mut face2 = Vec::with_capacity(du * dd);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                faces.push(AffineCellLabel::face(d, a, b, c)?);
                face2.push([lx(b, c), ly(a, c), lz(a, b)]);
            }
        }
    }

    let labels = [vertices, edges, faces];
    let complex = DeltaComplex::new(3 * du, face1, face2)
        .with_labels(labels_to_strings(&labels, Space::Affine));
    let report = complex.validate();
    assert!(report.is_valid(), "affine complex invalid: {report}");
    Ok(FermatComplex::from_parts(d, Space::Affine, complex, labels))
}

/// Builds the skeleton of the projective degree-d curve complement, the
/// quotient of the affine skeleton by the diagonal μ_d action: 3 vertices,
/// 3d edges, d² triangles.
pub fn build_projective(d: u32) -> Result<FermatComplex, FermatError> {
    check_degree(d)?;
    let du = d as usize;

    let vertices = vec![
        AffineCellLabel::vertex_x(d, 0)?,
        AffineCellLabel::vertex_y(d, 0)?,
        AffineCellLabel::vertex_z(d, 0)?,
    ];

    let mut edges = Vec::with_capacity(3 * du);
    let mut face1 = Vec::with_capacity(3 * du);
    for e in 0..d {
        edges.push(AffineCellLabel::edge_x(d, 0, e)?);
        face1.push([1, 2]);
    }
    for e in 0..d {
        edges.push(AffineCellLabel::edge_y(d, 0, e)?);
        face1.push([0, 2]);
    }
    for e in 0..d {
        edges.push(AffineCellLabel::edge_z(d, 0, e)?);
        face1.push([0, 1]);
    }

    // Edge indices: Lx[0:e] -> e, Ly[0:e] -> d + e, Lz[0:e] -> 2d + e.
    let lx = |e: u32| e as usize;
    let ly = |e: u32| du + e as usize;
    let lz = |e: u32| 2 * du + e as usize;

    let mut faces = Vec::with_capacity(du * du);
    let mut face2 = Vec::with_capacity(du * du);
    for b in 0..d {
        for c in 0..d {
            faces.push(AffineCellLabel::face(d, 0, b, c)?);
            // The Lx face of X[0:b:c] canonicalizes to Lx[0:(c−b) mod d].
            face2.push([lx((c + d - b) % d), ly(c), lz(b)]);
        }
    }

    let labels = [vertices, edges, faces];
    let complex = DeltaComplex::new(3, face1, face2)
        .with_labels(labels_to_strings(&labels, Space::Projective));
    let report = complex.validate();
    assert!(report.is_valid(), "projective complex invalid: {report}");
    Ok(FermatComplex::from_parts(d, Space::Projective, complex, labels))
}

/// Embeds a point of a labelled cell into C³. `weights` are the d-th powers
/// of the coordinate magnitudes: non-negative, summing to 1, and vanishing on
/// the coordinates the cell omits (all within 1e−9). The coordinate at a
/// stored position with residue k is ζ_d^k · weight^(1/d).
pub fn realize(cell: &AffineCellLabel, weights: [f64; 3]) -> Result<ComplexTriple, FermatError> {
    let d = cell.degree;
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > REALIZE_TOL {
        return Err(FermatError::WeightSum(sum));
    }
    for (position, &value) in weights.iter().enumerate() {
        if value < -REALIZE_TOL {
            return Err(FermatError::NegativeWeight { position, value });
        }
    }
    let stored = cell.kind.stored_positions();
    let mut coords = [Complex64::new(0.0, 0.0); 3];
    for position in 0..3 {
        if stored.contains(&position) {
            let mag = weights[position].max(0.0).powf(1.0 / d as f64);
            let angle = TAU * cell.roots[position] as f64 / d as f64;
            coords[position] = Complex64::from_polar(mag, angle);
        } else if weights[position] > REALIZE_TOL {
            return Err(FermatError::WeightOffCell { position, value: weights[position] });
        }
    }
    Ok(ComplexTriple::from_coords(coords))
}

/// Identifies which affine cell a point of the skeleton lies in, returning
/// the label and the barycentric weights (the real d-th powers). Coordinates
/// of magnitude at most `tol` count as omitted; the surviving powers must be
/// real and non-negative within `tol` and sum to 1 within `tol`.
pub fn locate(
    p: &ComplexTriple,
    d: u32,
    tol: f64,
) -> Result<(AffineCellLabel, [f64; 3]), FermatError> {
    check_degree(d)?;
    let fail = |reason: String| FermatError::NotOnSkeleton { degree: d, reason };
    let coords = p.coords();
    let mut weights = [0.0f64; 3];
    let mut residues = [0u32; 3];
    let mut present = [false; 3];
    for i in 0..3 {
        let w = coords[i];
        if w.norm() <= tol {
            continue;
        }
        let power = crate::retraction::cpow(w, d);
        if power.im.abs() > tol {
            return Err(fail(format!(
                "coordinate {i} power has imaginary part {:.3e}",
                power.im
            )));
        }
        if power.re < -tol {
            return Err(fail(format!(
                "coordinate {i} power is negative ({:.3e})",
                power.re
            )));
        }
        let ratio = w.arg() * d as f64 / TAU;
        let k = ratio.round();
        if (ratio - k).abs() > 0.26 {
            return Err(fail(format!(
                "coordinate {i} is off every root-of-unity ray (argument {:.6})",
                w.arg()
            )));
        }
        present[i] = true;
        residues[i] = (k as i64).rem_euclid(d as i64) as u32;
        weights[i] = power.re.max(0.0);
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(fail(format!("power sum is {sum}, expected 1")));
    }
    let label = match present {
        [true, true, true] => AffineCellLabel::face(d, residues[0], residues[1], residues[2]),
        [false, true, true] => AffineCellLabel::edge_x(d, residues[1], residues[2]),
        [true, false, true] => AffineCellLabel::edge_y(d, residues[0], residues[2]),
        [true, true, false] => AffineCellLabel::edge_z(d, residues[0], residues[1]),
        [true, false, false] => AffineCellLabel::vertex_x(d, residues[0]),
        [false, true, false] => AffineCellLabel::vertex_y(d, residues[1]),
        [false, false, true] => AffineCellLabel::vertex_z(d, residues[2]),
        [false, false, false] => return Err(fail("all coordinates vanish".into())),
    }
    .expect("residues are reduced mod d");
    Ok((label, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn affine_cell_counts() {
        for d in 1..=6u32 {
            let k = build_affine(d).unwrap();
            let du = d as usize;
            assert_eq!(k.cell_count(0), 3 * du);
            assert_eq!(k.cell_count(1), 3 * du * du);
            assert_eq!(k.cell_count(2), du * du * du);
            assert!(k.complex.validate().is_valid());
        }
    }

    #[test]
    fn projective_cell_counts() {
        for d in 1..=6u32 {
            let k = build_projective(d).unwrap();
            let du = d as usize;
            assert_eq!(k.cell_count(0), 3);
            assert_eq!(k.cell_count(1), 3 * du);
            assert_eq!(k.cell_count(2), du * du);
            assert!(k.complex.validate().is_valid());
        }
    }

    #[test]
    fn zero_degree_rejected() {
        assert!(matches!(build_affine(0), Err(FermatError::InvalidDegree)));
        assert!(matches!(build_projective(0), Err(FermatError::InvalidDegree)));
        assert!(matches!(
            AffineCellLabel::face(2, 2, 0, 0),
            Err(FermatError::RootOutOfRange { value: 2, degree: 2 })
        ));
    }

    #[test]
    fn label_round_trip_through_index() {
        for d in [1u32, 2, 3, 5] {
            for k in [build_affine(d).unwrap(), build_projective(d).unwrap()] {
                for dim in 0..3u8 {
                    for i in 0..k.cell_count(dim) {
                        let id = CellId { dim, index: i };
                        let label = *k.label_of(id).unwrap();
                        assert_eq!(k.cell_id(&label), Some(id));
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_arrays_match_label_faces() {
        for d in [1u32, 2, 4] {
            let k = build_affine(d).unwrap();
            for (i, label) in k.labels[2].iter().enumerate() {
                let expected: Vec<usize> = label
                    .faces()
                    .iter()
                    .map(|f| k.cell_id(f).unwrap().index)
                    .collect();
                assert_eq!(k.complex.face2()[i].to_vec(), expected);
            }
            for (i, label) in k.labels[1].iter().enumerate() {
                let expected: Vec<usize> = label
                    .faces()
                    .iter()
                    .map(|f| k.cell_id(f).unwrap().index)
                    .collect();
                assert_eq!(k.complex.face1()[i].to_vec(), expected);
            }
        }
    }

    #[test]
    fn projective_boundaries_are_canonicalized_affine_faces() {
        for d in [2u32, 3, 5] {
            let k = build_projective(d).unwrap();
            for (i, label) in k.labels[2].iter().enumerate() {
                let expected: Vec<usize> = label
                    .faces()
                    .iter()
                    .map(|f| k.cell_id(f).unwrap().index)
                    .collect();
                assert_eq!(k.complex.face2()[i].to_vec(), expected, "faces of {label}");
            }
        }
    }

    #[test]
    fn group_action_is_equivariant_on_faces() {
        for d in [2u32, 3, 4] {
            let k = build_affine(d).unwrap();
            let mut elements = vec![];
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        elements.push(UnityTuple::new(d, [i, j, l]).unwrap());
                    }
                }
            }
            for label in k.labels[1].iter().chain(k.labels[2].iter()) {
                for g in &elements {
                    let moved_faces: Vec<_> =
                        label.faces().iter().map(|f| act(g, f)).collect();
                    assert_eq!(act(g, label).faces(), moved_faces);
                }
            }
        }
    }

    #[test]
    fn compose_and_diagonal() {
        let g = UnityTuple::new(3, [1, 0, 2]).unwrap();
        let h = UnityTuple::new(3, [2, 2, 2]).unwrap();
        assert_eq!(g.compose(&h).exponents, [0, 2, 1]);
        assert!(h.is_diagonal());
        assert!(!g.is_diagonal());
        assert_eq!(UnityTuple::diagonal(3, 2).unwrap(), h);
    }

    #[test]
    fn canonicalization_examples() {
        let x = AffineCellLabel::face(3, 2, 1, 0).unwrap();
        let c = canonical_projective(&x);
        assert_eq!(c.representative().roots, [0, 2, 1]);
        assert_eq!(c.to_string(), "X[0:2:1]");

        let e = AffineCellLabel::edge_x(4, 3, 1).unwrap();
        let c = canonical_projective(&e);
        assert_eq!(c.representative().roots, [0, 0, 2]);
        assert_eq!(c.to_string(), "Lx[0:2]");

        let v = AffineCellLabel::vertex_y(5, 4).unwrap();
        assert_eq!(canonical_projective(&v).representative().roots, [0, 0, 0]);
    }

    #[test]
    fn projective_lookup_identifies_orbits() {
        let k = build_projective(2).unwrap();
        let a = AffineCellLabel::face(2, 1, 0, 1).unwrap();
        let b = AffineCellLabel::face(2, 0, 1, 0).unwrap();
        assert_eq!(k.cell_id(&a), k.cell_id(&b));
        assert!(k.cell_id(&a).is_some());
        // Orbit mates of an edge.
        let e1 = AffineCellLabel::edge_z(2, 1, 1).unwrap();
        let e2 = AffineCellLabel::edge_z(2, 0, 0).unwrap();
        assert_eq!(k.cell_id(&e1), k.cell_id(&e2));
    }

    #[test]
    fn diagonal_orbit_of_demo_cell() {
        let x = AffineCellLabel::face(2, 0, 0, 0).unwrap();
        let orbit = diagonal_orbit(&x);
        assert_eq!(orbit.len(), 2);
        assert_eq!(orbit[0].roots, [0, 0, 0]);
        assert_eq!(orbit[1].roots, [1, 1, 1]);
    }

    #[test]
    fn display_forms() {
        assert_eq!(AffineCellLabel::face(3, 2, 1, 0).unwrap().to_string(), "X(2,1,0)");
        assert_eq!(AffineCellLabel::edge_y(3, 1, 2).unwrap().to_string(), "Ly(1,2)");
        assert_eq!(AffineCellLabel::vertex_z(3, 2).unwrap().to_string(), "Vz(2)");
    }

    #[test]
    fn realize_vertices_of_degree_two() {
        let v = AffineCellLabel::vertex_x(2, 0).unwrap();
        let p = realize(&v, [1.0, 0.0, 0.0]).unwrap();
        assert!((p.x - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(p.y.is_zero() && p.z.is_zero());

        let v = AffineCellLabel::vertex_x(2, 1).unwrap();
        let p = realize(&v, [1.0, 0.0, 0.0]).unwrap();
        assert!((p.x - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        let v = AffineCellLabel::vertex_y(2, 1).unwrap();
        let p = realize(&v, [0.0, 1.0, 0.0]).unwrap();
        assert!((p.y - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn realize_rejects_bad_weights() {
        let e = AffineCellLabel::edge_x(2, 0, 1).unwrap();
        assert!(matches!(
            realize(&e, [0.5, 0.25, 0.25]),
            Err(FermatError::WeightOffCell { position: 0, .. })
        ));
        assert!(matches!(
            realize(&e, [0.0, 0.6, 0.6]),
            Err(FermatError::WeightSum(_))
        ));
        assert!(matches!(
            realize(&e, [0.0, 1.2, -0.2]),
            Err(FermatError::NegativeWeight { position: 2, .. })
        ));
    }

    #[test]
    fn realized_points_sit_on_the_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=5u32 {
            let k = build_affine(d).unwrap();
            for _ in 0..50 {
                let dim = rng.gen_range(0..3u8);
                let i = rng.gen_range(0..k.cell_count(dim));
                let label = k.labels[dim as usize][i];
                let mut weights = [0.0f64; 3];
                let stored = label.kind.stored_positions();
                let mut remaining = 1.0;
                for (j, &pos) in stored.iter().enumerate() {
                    if j + 1 == stored.len() {
                        weights[pos] = remaining;
                    } else {
                        let w = rng.gen_range(0.0..remaining);
                        weights[pos] = w;
                        remaining -= w;
                    }
                }
                let p = realize(&label, weights).unwrap();
                assert!(
                    p.surface_defect(d) <= 1e-12,
                    "defect {:.3e} on {label}",
                    p.surface_defect(d)
                );
            }
        }
    }

    #[test]
    fn locate_example() {
        // (-0.6, 0.8, 0) has squares (0.36, 0.64, 0): the edge Lz(1,0).
        let p = ComplexTriple::new(
            Complex64::new(-0.6, 0.0),
            Complex64::new(0.8, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let (label, weights) = locate(&p, 2, 1e-6).unwrap();
        assert_eq!(label, AffineCellLabel::edge_z(2, 1, 0).unwrap());
        assert!((weights[0] - 0.36).abs() < 1e-12);
        assert!((weights[1] - 0.64).abs() < 1e-12);
        assert_eq!(weights[2], 0.0);
    }

    #[test]
    fn locate_rejects_off_skeleton_points() {
        // On the surface but with a genuinely complex power.
        let p = ComplexTriple::new(
            Complex64::new(0.9, 0.3),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!(matches!(
            locate(&p, 2, 1e-6),
            Err(FermatError::NotOnSkeleton { .. })
        ));
        // Negative real power: x² = -0.36 is not a triangle weight.
        let p = ComplexTriple::new(
            Complex64::new(0.0, 0.6),
            Complex64::new(0.8, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!(matches!(
            locate(&p, 2, 1e-6),
            Err(FermatError::NotOnSkeleton { .. })
        ));
        let zero = ComplexTriple::new(Complex64::zero(), Complex64::zero(), Complex64::zero());
        assert!(matches!(
            locate(&zero, 2, 1e-6),
            Err(FermatError::NotOnSkeleton { .. })
        ));
    }

    #[test]
    fn realize_then_locate_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for d in 1..=5u32 {
            let k = build_affine(d).unwrap();
            for _ in 0..100 {
                let dim = rng.gen_range(0..3u8);
                let i = rng.gen_range(0..k.cell_count(dim));
                let label = k.labels[dim as usize][i];
                let stored = label.kind.stored_positions();
                // Interior weights, bounded away from the faces.
                let mut weights = [0.0f64; 3];
                let n = stored.len();
                let mut raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
                let total: f64 = raw.iter().sum();
                for v in &mut raw {
                    *v /= total;
                }
                for (j, &pos) in stored.iter().enumerate() {
                    weights[pos] = raw[j];
                }
                let p = realize(&label, weights).unwrap();
                let (found, back) = locate(&p, d, 1e-6).unwrap();
                assert_eq!(found, label);
                for j in 0..3 {
                    assert!(
                        (back[j] - weights[j]).abs() <= 1e-9,
                        "weight {j} drifted: {} vs {}",
                        back[j],
                        weights[j]
                    );
                }
            }
        }
    }

    #[test]
    fn euler_characteristics() {
        for d in 1..=6i64 {
            let a = build_affine(d as u32).unwrap();
            assert_eq!(a.complex.euler_characteristic(), d * d * d - 3 * d * d + 3 * d);
            let p = build_projective(d as u32).unwrap();
            assert_eq!(p.complex.euler_characteristic(), d * d - 3 * d + 3);
        }
    }
}
