//! JSON serialization of built complexes.
//!
//! A [`ComplexDocument`] records everything needed to reconstruct a
//! [`FermatComplex`]: degree, space, the labelled cells per dimension in
//! index order, and the two face-map tables. Export is byte-stable — the
//! same complex always serializes to the same text — and import validates
//! the document before handing back a complex, so a hand-edited file cannot
//! smuggle in an out-of-range residue or face index.

use crate::delta::DeltaComplex;
use crate::fermat::{AffineCellLabel, CellKind, FermatComplex, Space};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The document schema version this build reads and writes.
pub const FORMAT_VERSION: &str = "1";

#[derive(Error, Debug)]
pub enum DocumentError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported format version {found:?}, expected {FORMAT_VERSION:?}")]
    UnsupportedVersion { found: String },
    #[error("unknown space {found:?}, expected \"affine\" or \"projective\"")]
    UnknownSpace { found: String },
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("{context}: unknown cell kind {kind:?}")]
    UnknownKind { context: String, kind: String },
    #[error("{context}: kind {kind} belongs to dimension {actual}, not {expected}")]
    WrongDimension { context: String, kind: String, expected: u8, actual: u8 },
    #[error("{context}: kind {kind} takes {expected} residues, found {found}")]
    WrongArity { context: String, kind: String, expected: usize, found: usize },
    #[error("{context}: residue {value} out of range for degree {degree}")]
    ResidueOutOfRange { context: String, value: u32, degree: u32 },
    #[error("{context}: projective labels must be canonical (first residue 0)")]
    NotCanonical { context: String },
    #[error("{context}: face index {index} out of range ({limit} cells available)")]
    FaceIndexOutOfRange { context: String, index: usize, limit: usize },
    #[error("face table length {found} does not match {cells} cells of dimension {dim}")]
    FaceTableMismatch { dim: u8, cells: usize, found: usize },
    #[error("face maps are incompatible: {0}")]
    InvalidComplex(String),
    #[error("duplicate cell label {label} in dimension {dim}")]
    DuplicateLabel { dim: u8, label: String },
}

/// One labelled cell: its kind tag and the stored residues in position
/// order.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CellRecord {
    pub kind: String,
    pub residues: Vec<u32>,
}

impl CellRecord {
    fn of(label: &AffineCellLabel) -> Self {
        CellRecord {
            kind: label.kind.name().to_string(),
            residues: label.stored(),
        }
    }
}

/// Serialized form of a built complex. Field order is the serialization
/// order; cells appear in the builder's index order.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ComplexDocument {
    pub format_version: String,
    pub degree: u32,
    pub space: String,
    pub vertices: Vec<CellRecord>,
    pub edges: Vec<CellRecord>,
    pub faces: Vec<CellRecord>,
    /// Endpoint vertex indices of each edge, in edge index order.
    pub face1: Vec<[usize; 2]>,
    /// Boundary edge indices of each triangle, in triangle index order.
    pub face2: Vec<[usize; 3]>,
}

impl ComplexDocument {
    pub fn of(complex: &FermatComplex) -> Self {
        ComplexDocument {
            format_version: FORMAT_VERSION.to_string(),
            degree: complex.degree,
            space: complex.space.to_string(),
            vertices: complex.labels[0].iter().map(CellRecord::of).collect(),
            edges: complex.labels[1].iter().map(CellRecord::of).collect(),
            faces: complex.labels[2].iter().map(CellRecord::of).collect(),
            face1: complex.complex.face1().to_vec(),
            face2: complex.complex.face2().to_vec(),
        }
    }
}

/// Serializes a complex as pretty-printed JSON with a trailing newline.
/// Byte-stable: equal complexes produce identical text.
pub fn export_complex(complex: &FermatComplex) -> String {
    let doc = ComplexDocument::of(complex);
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

fn parse_label(
    record: &CellRecord,
    degree: u32,
    space: Space,
    expected_dim: u8,
    context: &str,
) -> Result<AffineCellLabel, DocumentError> {
    let kind = CellKind::from_name(&record.kind).ok_or_else(|| DocumentError::UnknownKind {
        context: context.to_string(),
        kind: record.kind.clone(),
    })?;
    if kind.dim() != expected_dim {
        return Err(DocumentError::WrongDimension {
            context: context.to_string(),
            kind: record.kind.clone(),
            expected: expected_dim,
            actual: kind.dim(),
        });
    }
    if record.residues.len() != kind.arity() {
        return Err(DocumentError::WrongArity {
            context: context.to_string(),
            kind: record.kind.clone(),
            expected: kind.arity(),
            found: record.residues.len(),
        });
    }
    for &value in &record.residues {
        if value >= degree {
            return Err(DocumentError::ResidueOutOfRange {
                context: context.to_string(),
                value,
                degree,
            });
        }
    }
    if space == Space::Projective && record.residues[0] != 0 {
        return Err(DocumentError::NotCanonical { context: context.to_string() });
    }
    Ok(AffineCellLabel::new(kind, degree, &record.residues).expect("residues checked"))
}

/// Parses and validates a serialized complex. Checks the format version,
/// space and degree, every label's kind, arity and residue range (and
/// canonical form for projective documents), the face-table shapes and
/// index ranges, and finally the Δ-complex compatibility identities.
pub fn import_complex(text: &str) -> Result<FermatComplex, DocumentError> {
    let doc: ComplexDocument = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    if doc.format_version != FORMAT_VERSION {
        return Err(DocumentError::UnsupportedVersion { found: doc.format_version });
    }
    let space = match doc.space.as_str() {
        "affine" => Space::Affine,
        "projective" => Space::Projective,
        other => return Err(DocumentError::UnknownSpace { found: other.to_string() }),
    };
    if doc.degree == 0 {
        return Err(DocumentError::InvalidDegree);
    }

    let mut labels: [Vec<AffineCellLabel>; 3] = [vec![], vec![], vec![]];
    let levels = [(&doc.vertices, 0u8), (&doc.edges, 1u8), (&doc.faces, 2u8)];
    for (records, dim) in levels {
        for (i, record) in records.iter().enumerate() {
            let context = format!("{}-cell #{i}", dim);
            let label = parse_label(record, doc.degree, space, dim, &context)?;
            if labels[dim as usize].contains(&label) {
                return Err(DocumentError::DuplicateLabel { dim, label: label.to_string() });
            }
            labels[dim as usize].push(label);
        }
    }

    if doc.face1.len() != doc.edges.len() {
        return Err(DocumentError::FaceTableMismatch {
            dim: 1,
            cells: doc.edges.len(),
            found: doc.face1.len(),
        });
    }
    if doc.face2.len() != doc.faces.len() {
        return Err(DocumentError::FaceTableMismatch {
            dim: 2,
            cells: doc.faces.len(),
            found: doc.face2.len(),
        });
    }
    for (i, pair) in doc.face1.iter().enumerate() {
        for &v in pair {
            if v >= doc.vertices.len() {
                return Err(DocumentError::FaceIndexOutOfRange {
                    context: format!("edge #{i}"),
                    index: v,
                    limit: doc.vertices.len(),
                });
            }
        }
    }
    for (i, triple) in doc.face2.iter().enumerate() {
        for &e in triple {
            if e >= doc.edges.len() {
                return Err(DocumentError::FaceIndexOutOfRange {
                    context: format!("2-cell #{i}"),
                    index: e,
                    limit: doc.edges.len(),
                });
            }
        }
    }

    let complex = DeltaComplex::new(doc.vertices.len(), doc.face1.clone(), doc.face2.clone());
    let report = complex.validate();
    if !report.is_valid() {
        return Err(DocumentError::InvalidComplex(report.to_string()));
    }
    Ok(FermatComplex::from_parts(doc.degree, space, complex, labels))
}
