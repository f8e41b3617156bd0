//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when a verification run fails its tolerance,
//! 2 for invalid arguments or I/O problems. [`run`] takes the argument list
//! and an output sink so tests can drive it in-process.

use crate::document::export_complex;
use crate::fermat::{
    build_affine, build_projective, canonical_projective, diagonal_orbit, AffineCellLabel,
    FermatComplex, Space,
};
use crate::homology::betti_and_torsion_summary;
use crate::mesh::triangulate_octants;
use crate::verify::{verify_projective_invariance, verify_retraction};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "fermat-complex",
    version,
    about = "Skeleta of Fermat curve complements: exact homology and verified retractions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SpaceArg {
    Affine,
    Projective,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Affine => Space::Affine,
            SpaceArg::Projective => Space::Projective,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a skeleton complex and write it as JSON.
    Build {
        /// Degree of the surface x^d + y^d + z^d = 1.
        #[arg(long)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = SpaceArg::Affine)]
        space: SpaceArg,
        /// Output path for the JSON document.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the homology groups of a skeleton.
    Homology {
        #[arg(long)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = SpaceArg::Affine)]
        space: SpaceArg,
        /// Emit a JSON record instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the Euler characteristic, from cell counts and from Betti
    /// numbers.
    Euler {
        #[arg(long)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = SpaceArg::Affine)]
        space: SpaceArg,
    },
    /// Monte Carlo verification of the retraction contracts.
    Verify {
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance every aggregated residual must meet.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Size of the uniform time grid on [0, 1].
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Check projective well-definedness instead of the retraction
        /// trajectory contract.
        #[arg(long)]
        projective: bool,
    },
    /// Write the degree-2 unit-sphere triangulation as an OBJ mesh.
    Mesh {
        /// Triangles per octant edge; each octant holds resolution² faces.
        #[arg(long)]
        resolution: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the degree-2 cell inventory with its projective
    /// identifications.
    DemoD2,
}

/// Runs the CLI against an argument list, writing everything to `out`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(out, "error: {message}");
            2
        }
    }
}

fn build_space(degree: u32, space: Space) -> Result<FermatComplex, String> {
    let built = match space {
        Space::Affine => build_affine(degree),
        Space::Projective => build_projective(degree),
    };
    built.map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct HomologyRecord {
    degree: u32,
    space: String,
    cells: [usize; 3],
    homology: [String; 3],
    betti: [usize; 3],
    euler_characteristic: i64,
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, String> {
    let io_err = |e: std::io::Error| e.to_string();
    match command {
        Command::Build { degree, space, out: path } => {
            let complex = build_space(degree, space.into())?;
            let text = export_complex(&complex);
            std::fs::write(&path, text).map_err(io_err)?;
            writeln!(
                out,
                "wrote {} degree-{} complex to {} ({} vertices, {} edges, {} faces)",
                complex.space,
                degree,
                path.display(),
                complex.cell_count(0),
                complex.cell_count(1),
                complex.cell_count(2),
            )
            .map_err(io_err)?;
            Ok(0)
        }
        Command::Homology { degree, space, json } => {
            let complex = build_space(degree, space.into())?;
            let summary = betti_and_torsion_summary(&complex.complex);
            if json {
                let record = HomologyRecord {
                    degree,
                    space: complex.space.to_string(),
                    cells: summary.cells,
                    homology: [
                        summary.groups[0].to_string(),
                        summary.groups[1].to_string(),
                        summary.groups[2].to_string(),
                    ],
                    betti: summary.betti,
                    euler_characteristic: summary.euler_from_cells,
                };
                let text = serde_json::to_string_pretty(&record).expect("record serializes");
                writeln!(out, "{text}").map_err(io_err)?;
            } else {
                writeln!(out, "degree {} {} skeleton", degree, complex.space).map_err(io_err)?;
                writeln!(out, "{summary}").map_err(io_err)?;
            }
            if summary.consistent {
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Euler { degree, space } => {
            let complex = build_space(degree, space.into())?;
            let summary = betti_and_torsion_summary(&complex.complex);
            writeln!(
                out,
                "degree {} {} skeleton: Euler characteristic {} from cells, {} from Betti numbers",
                degree, complex.space, summary.euler_from_cells, summary.euler_from_betti
            )
            .map_err(io_err)?;
            if summary.consistent {
                Ok(0)
            } else {
                writeln!(out, "MISMATCH between the two computations").map_err(io_err)?;
                Ok(1)
            }
        }
        Command::Verify { degree, samples, seed, tol, steps, projective } => {
            if degree == 0 {
                return Err("degree must be at least 1".to_string());
            }
            let report = if projective {
                verify_projective_invariance(degree, samples, seed, tol)
            } else {
                verify_retraction(degree, samples, seed, tol, steps)
            };
            writeln!(out, "{report}").map_err(io_err)?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Mesh { resolution, out: path } => {
            let mesh = triangulate_octants(resolution).map_err(|e| e.to_string())?;
            std::fs::write(&path, mesh.to_obj()).map_err(io_err)?;
            writeln!(
                out,
                "wrote degree-2 sphere mesh to {} ({} vertices, {} faces)",
                path.display(),
                mesh.vertices.len(),
                mesh.faces.len()
            )
            .map_err(io_err)?;
            Ok(0)
        }
        Command::DemoD2 => {
            demo_d2(out).map_err(io_err)?;
            Ok(0)
        }
    }
}

/// Degree-2 roots of unity read as signs: residue 0 is +1, residue 1 is −1.
fn sign_str(residue: u32) -> &'static str {
    if residue == 0 {
        "+1"
    } else {
        "-1"
    }
}

fn affine_signs(label: &AffineCellLabel) -> String {
    let parts: Vec<&str> = label.stored().iter().map(|&r| sign_str(r)).collect();
    format!("{}({})", label.kind.name(), parts.join(","))
}

fn projective_signs(label: &AffineCellLabel) -> String {
    let parts: Vec<&str> = label.stored().iter().map(|&r| sign_str(r)).collect();
    format!("{}[{}]", label.kind.name(), parts.join(":"))
}

fn vertex_position_string(label: &AffineCellLabel) -> String {
    let position = label.kind.stored_positions()[0];
    let mut coords = ["0", "0", "0"];
    coords[position] = if label.stored()[0] == 0 { "1" } else { "-1" };
    format!("({}, {}, {})", coords[0], coords[1], coords[2])
}

fn demo_d2(out: &mut dyn Write) -> std::io::Result<()> {
    let affine = build_affine(2).expect("degree 2 is valid");
    let projective = build_projective(2).expect("degree 2 is valid");

    writeln!(out, "degree-2 skeleton inventory")?;
    writeln!(out)?;
    writeln!(
        out,
        "affine: {} vertices, {} edges, {} faces",
        affine.cell_count(0),
        affine.cell_count(1),
        affine.cell_count(2)
    )?;
    for label in &affine.labels[0] {
        writeln!(out, "  {} = {}", affine_signs(label), vertex_position_string(label))?;
    }
    let edge_list: Vec<String> = affine.labels[1].iter().map(affine_signs).collect();
    writeln!(out, "  edges: {}", edge_list.join(" "))?;
    let face_list: Vec<String> = affine.labels[2].iter().map(affine_signs).collect();
    writeln!(out, "  faces: {}", face_list.join(" "))?;

    writeln!(out)?;
    writeln!(
        out,
        "projective: {} vertices, {} edges, {} faces",
        projective.cell_count(0),
        projective.cell_count(1),
        projective.cell_count(2)
    )?;
    writeln!(out, "identifications under the diagonal sign change:")?;
    for dim in (0..3).rev() {
        for label in &projective.labels[dim] {
            let canonical = canonical_projective(label);
            let orbit: Vec<String> = diagonal_orbit(canonical.representative())
                .iter()
                .map(affine_signs)
                .collect();
            writeln!(
                out,
                "  {} = {{ {} }}",
                projective_signs(canonical.representative()),
                orbit.join(", ")
            )?;
        }
    }
    Ok(())
}
