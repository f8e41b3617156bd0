//! Explicit combinatorial models for complements of smooth plane curves.
//!
//! The surface `x^d + y^d + z^d = 1` in complex 3-space deformation retracts
//! onto a compact 2-dimensional skeleton whose cells are indexed by d-th roots
//! of unity. This crate builds that skeleton as a finite Δ-complex (in both an
//! affine and a projectivized version), computes its integer homology through
//! an exact Smith normal form, and numerically certifies the retraction maps
//! that collapse the surface onto the skeleton.
//!
//! The main entry points are [`fermat::build_affine`] and
//! [`fermat::build_projective`] for the complexes, [`homology::homology`] for
//! the homology groups, [`retraction::retract`] for the two-stage retraction,
//! and [`verify::verify_retraction`] for the Monte-Carlo contract checks. A
//! command-line interface is exposed through [`cli::run`].

pub mod cli;
pub mod delta;
pub mod document;
pub mod fermat;
pub mod homology;
pub mod mesh;
pub mod retraction;
pub mod verify;

pub use delta::{CellId, DeltaComplex, IntegerMatrix};
pub use document::{export_complex, import_complex, ComplexDocument};
pub use fermat::{build_affine, build_projective, AffineCellLabel, FermatComplex, Space};
pub use homology::{homology, smith_normal_form, AbelianGroup};
pub use mesh::{triangulate_octants, MeshDocument};
pub use retraction::ComplexTriple;
pub use verify::{verify_projective_invariance, verify_retraction, RetractionReport};
