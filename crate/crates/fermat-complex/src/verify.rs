//! Monte Carlo verification of the retraction contracts.
//!
//! Every check here samples random points of the surface
//! x^d + y^d + z^d = 1, pushes them through the retraction, and aggregates
//! worst-case residuals into a [`RetractionReport`]:
//!
//! * surface membership along whole trajectories;
//! * exact identity at t = 0;
//! * skeleton membership of the t = 1 endpoints;
//! * fixity of points that already lie on the skeleton;
//! * a continuity surrogate across the sign-region borders of the planar
//!   stage (image separation at most a fixed multiple of input separation);
//! * projective well-definedness (endpoints agree after scaling a
//!   representative by a d-th root of unity).
//!
//! Sampling is deterministic and order-independent: each sample owns an RNG
//! stream derived from (seed, purpose, sample index), and aggregation uses
//! only max / count reductions, so reports are bit-identical regardless of
//! how rayon schedules the work. The `*_flawed_*` entry points run the same
//! harness over deliberately broken maps and exist to demonstrate that the
//! checks actually catch such bugs.

use crate::fermat::{build_affine, canonical_projective, locate, realize};
use crate::retraction::{
    cpow, normalize_projective, retract_with, ComplexTriple, PlanarFlow, RetractionError,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::fmt;

/// Samples whose power sum is this close to 0 sit near the branch curve,
/// where the retraction is ill-conditioned; they are rejected and redrawn.
pub const NEAR_CURVE_REJECT: f64 = 1e-6;
/// Coordinate-magnitude threshold below which `locate` treats a coordinate
/// as vanished when classifying retraction endpoints.
pub const LOCATE_TOL: f64 = 1e-6;
/// Largest power-space offset used when building border-straddling pairs.
pub const BORDER_OFFSET_MAX: f64 = 1e-6;
/// Continuity surrogate: images of a border pair may be at most this factor
/// farther apart than the inputs.
pub const BORDER_LIPSCHITZ: f64 = 10.0;

// RNG stream purposes; kept disjoint so adding samples of one kind never
// shifts another kind's draws.
const STREAM_SAMPLE: u64 = 0;
const STREAM_FIX: u64 = 1;
const STREAM_BORDER: u64 = 2;
const STREAM_TWIST: u64 = 3;

fn stream_rng(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) | index);
    rng
}

fn normal_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn sample_surface_point(rng: &mut ChaCha8Rng, d: u32) -> ComplexTriple {
    loop {
        let x = normal_complex(rng);
        let y = normal_complex(rng);
        let s = Complex64::new(1.0, 0.0) - cpow(x, d) - cpow(y, d);
        if s.norm() < NEAR_CURVE_REJECT {
            continue;
        }
        let k = rng.gen_range(0..d);
        let mut z = Complex64::from_polar(
            s.norm().powf(1.0 / d as f64),
            (s.arg() + TAU * k as f64) / d as f64,
        );
        // Two Newton polish steps push the residual of z^d − s down to the
        // evaluation noise of the surface equation itself.
        for _ in 0..2 {
            let zd1 = cpow(z, d - 1);
            z -= (zd1 * z - s) / (zd1 * d as f64);
        }
        return ComplexTriple::new(x, y, z);
    }
}

/// Draws `count` random points of the surface x^d + y^d + z^d = 1: x and y
/// have independent standard-normal real and imaginary parts, z is a
/// uniformly chosen d-th root of the remainder. Draws landing within
/// [`NEAR_CURVE_REJECT`] of the branch curve are redrawn. Deterministic in
/// `seed` and independent of thread count.
pub fn sample_surface(d: u32, count: usize, seed: u64) -> Result<Vec<ComplexTriple>, RetractionError> {
    if d == 0 {
        return Err(RetractionError::ZeroDegree);
    }
    Ok((0..count)
        .into_par_iter()
        .map(|i| sample_surface_point(&mut stream_rng(seed, STREAM_SAMPLE, i as u64), d))
        .collect())
}

/// Worst-case residuals from a verification run. All residual fields are
/// non-negative maxima over every sample and time-grid point inspected;
/// `pass` holds exactly when each residual is at most `tolerance` and no
/// endpoint failed to locate on the skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct RetractionReport {
    pub degree: u32,
    pub samples: usize,
    pub tolerance: f64,
    /// max |x^d + y^d + z^d − 1| along trajectories.
    pub max_surface_residual: f64,
    /// Endpoint skeleton-membership defect: imaginary part, negativity, and
    /// sum defect of the coordinate powers at t = 1.
    pub max_endpoint_defect: f64,
    /// max |retract(P, 0) − P|; the implementation owes an exact zero here.
    pub max_identity_defect: f64,
    /// max over the t-grid of |retract(P, t) − P| for P on the skeleton.
    pub max_fixedpoint_drift: f64,
    /// Excess of border-pair image separation over [`BORDER_LIPSCHITZ`]
    /// times the input separation (0 when the continuity bound holds).
    pub max_border_mismatch: f64,
    /// Disagreement of retraction endpoints across a root-of-unity rescaling
    /// of the projective representative.
    pub max_projective_mismatch: f64,
    /// Endpoints the cell classifier could not place on the skeleton.
    pub endpoint_locate_failures: usize,
    /// Samples where a vanished coordinate had to grow along the fallback
    /// positive real ray.
    pub degenerate_ray_samples: usize,
    pub pass: bool,
}

impl RetractionReport {
    fn new(degree: u32, samples: usize, tolerance: f64) -> Self {
        RetractionReport {
            degree,
            samples,
            tolerance,
            max_surface_residual: 0.0,
            max_endpoint_defect: 0.0,
            max_identity_defect: 0.0,
            max_fixedpoint_drift: 0.0,
            max_border_mismatch: 0.0,
            max_projective_mismatch: 0.0,
            endpoint_locate_failures: 0,
            degenerate_ray_samples: 0,
            pass: false,
        }
    }

    fn seal(mut self) -> Self {
        let worst = [
            self.max_surface_residual,
            self.max_endpoint_defect,
            self.max_identity_defect,
            self.max_fixedpoint_drift,
            self.max_border_mismatch,
            self.max_projective_mismatch,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        self.pass = worst <= self.tolerance && self.endpoint_locate_failures == 0;
        self
    }
}

impl fmt::Display for RetractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "retraction report: degree {}, {} samples, tolerance {:.1e}",
            self.degree, self.samples, self.tolerance
        )?;
        writeln!(f, "  max surface residual     {:.3e}", self.max_surface_residual)?;
        writeln!(f, "  max endpoint defect      {:.3e}", self.max_endpoint_defect)?;
        writeln!(f, "  max identity defect      {:.3e}", self.max_identity_defect)?;
        writeln!(f, "  max fixed-point drift    {:.3e}", self.max_fixedpoint_drift)?;
        writeln!(f, "  max border mismatch      {:.3e}", self.max_border_mismatch)?;
        writeln!(f, "  max projective mismatch  {:.3e}", self.max_projective_mismatch)?;
        writeln!(f, "  endpoint locate failures {}", self.endpoint_locate_failures)?;
        writeln!(f, "  degenerate ray samples   {}", self.degenerate_ray_samples)?;
        write!(f, "  verdict: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

/// Per-sample aggregate, combined with max / sum so the rayon reduction is
/// order-independent.
#[derive(Clone, Copy, Default)]
struct Partial {
    surface: f64,
    endpoint: f64,
    identity: f64,
    fixity: f64,
    border: f64,
    projective: f64,
    locate_failures: usize,
    degenerate: usize,
}

impl Partial {
    fn combine(self, other: Partial) -> Partial {
        Partial {
            surface: self.surface.max(other.surface),
            endpoint: self.endpoint.max(other.endpoint),
            identity: self.identity.max(other.identity),
            fixity: self.fixity.max(other.fixity),
            border: self.border.max(other.border),
            projective: self.projective.max(other.projective),
            locate_failures: self.locate_failures + other.locate_failures,
            degenerate: self.degenerate + other.degenerate,
        }
    }
}

fn time_grid(steps: usize) -> Vec<f64> {
    let steps = steps.max(2);
    (0..steps).map(|j| j as f64 / (steps - 1) as f64).collect()
}

/// Skeleton-membership defect of an endpoint: its coordinate powers must be
/// real, non-negative, and sum to 1.
fn endpoint_defect(p: &ComplexTriple, d: u32) -> f64 {
    let powers = p.powers(d);
    let mut defect = 0.0f64;
    let mut sum = 0.0;
    for w in powers {
        defect = defect.max(w.im.abs()).max(-w.re);
        sum += w.re;
    }
    defect.max((sum - 1.0).abs())
}

fn trajectory_partial(flow: PlanarFlow, p: &ComplexTriple, d: u32, grid: &[f64]) -> Partial {
    let mut out = Partial::default();
    for &t in grid {
        match retract_with(flow, p, t, d, true) {
            Ok((img, degenerate)) => {
                if degenerate {
                    out.degenerate += 1;
                }
                out.surface = out.surface.max(img.surface_defect(d));
                if t == 0.0 {
                    out.identity = out.identity.max(p.distance(&img));
                }
                if t == 1.0 {
                    out.endpoint = out.endpoint.max(endpoint_defect(&img, d));
                    if locate(&img, d, LOCATE_TOL).is_err() {
                        out.locate_failures += 1;
                    }
                }
            }
            Err(_) => {
                // A trajectory the map refuses to follow counts as an
                // unbounded residual, never as a skipped sample.
                out.surface = f64::INFINITY;
            }
        }
    }
    out
}

/// Draws interior barycentric weights over `arity` stored positions, bounded
/// away from the cell's faces.
fn interior_weights(rng: &mut ChaCha8Rng, positions: &[usize]) -> [f64; 3] {
    let mut weights = [0.0f64; 3];
    let raw: Vec<f64> = positions.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    for (&pos, value) in positions.iter().zip(raw) {
        weights[pos] = value / total;
    }
    weights
}

fn fixity_partial(
    flow: PlanarFlow,
    cells: &crate::fermat::FermatComplex,
    d: u32,
    grid: &[f64],
    rng: &mut ChaCha8Rng,
) -> Partial {
    let dim = rng.gen_range(0..3u8);
    let idx = rng.gen_range(0..cells.cell_count(dim));
    let label = cells.labels[dim as usize][idx];
    let weights = interior_weights(rng, label.kind.stored_positions());
    let p = realize(&label, weights).expect("interior weights are valid");
    let mut out = Partial::default();
    for &t in grid {
        match retract_with(flow, &p, t, d, true) {
            Ok((img, _)) => out.fixity = out.fixity.max(p.distance(&img)),
            Err(_) => out.fixity = f64::INFINITY,
        }
    }
    out
}

/// A pair of surface points with real coordinate powers sitting `±offset/2`
/// on either side of a sign-region border, plus their separation.
fn border_pair(rng: &mut ChaCha8Rng, d: u32) -> (ComplexTriple, ComplexTriple, f64) {
    // Power-level layout before permutation: position 0 crosses zero,
    // position 1 carries the second sign, position 2 absorbs the remainder.
    let offset = rng.gen_range(0.2..1.0) * BORDER_OFFSET_MAX;
    let crossing_plus = offset / 2.0;
    let crossing_minus = -offset / 2.0;
    // Family 0: border of the all-non-negative triangle (second coordinate
    // positive). Family 1: border between one- and two-negative regions
    // (second coordinate negative).
    let family = rng.gen_range(0..2u8);
    let second = match family {
        0 => rng.gen_range(0.2..0.8),
        _ => -rng.gen_range(0.2..0.8),
    };
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let perm = PERMS[rng.gen_range(0..PERMS.len())];

    // Root rays: the crossing coordinate uses an adjacent (even, odd) ray
    // pair so the two points stay close in C³; a shared negative power uses
    // one common odd ray; positive powers use one common even ray.
    let crossing_ray = rng.gen_range(0..d);
    let rays: [u32; 3] = [crossing_ray, rng.gen_range(0..d), rng.gen_range(0..d)];

    let build = |crossing: f64| {
        let q = [crossing, second, 1.0 - crossing - second];
        let mut coords = [Complex64::new(0.0, 0.0); 3];
        for slot in 0..3 {
            let value = q[slot];
            let angle = if value >= 0.0 {
                TAU * rays[slot] as f64 / d as f64
            } else {
                (TAU * rays[slot] as f64 + PI) / d as f64
            };
            coords[perm[slot]] = Complex64::from_polar(value.abs().powf(1.0 / d as f64), angle);
        }
        ComplexTriple::from_coords(coords)
    };
    let plus = build(crossing_plus);
    let minus = build(crossing_minus);
    let separation = plus.distance(&minus);
    (plus, minus, separation)
}

fn border_partial(flow: PlanarFlow, d: u32, grid: &[f64], rng: &mut ChaCha8Rng) -> Partial {
    let (plus, minus, separation) = border_pair(rng, d);
    let mut out = Partial::default();
    for &t in grid {
        let a = retract_with(flow, &plus, t, d, true);
        let b = retract_with(flow, &minus, t, d, true);
        match (a, b) {
            (Ok((ia, _)), Ok((ib, _))) => {
                let excess = ia.distance(&ib) - BORDER_LIPSCHITZ * separation;
                out.border = out.border.max(excess.max(0.0));
            }
            _ => out.border = f64::INFINITY,
        }
    }
    out
}

fn verify_retraction_impl(
    flow: PlanarFlow,
    d: u32,
    samples: usize,
    seed: u64,
    tolerance: f64,
    steps: usize,
) -> RetractionReport {
    let mut report = RetractionReport::new(d, samples, tolerance);
    if d == 0 {
        report.max_surface_residual = f64::INFINITY;
        return report.seal();
    }
    let grid = time_grid(steps);
    let side_samples = (samples / 10).max(32);
    let cells = build_affine(d).expect("degree checked above");

    let trajectories = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, STREAM_SAMPLE, i as u64);
            let p = sample_surface_point(&mut rng, d);
            trajectory_partial(flow, &p, d, &grid)
        })
        .reduce(Partial::default, Partial::combine);

    let fixity = (0..side_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, STREAM_FIX, i as u64);
            fixity_partial(flow, &cells, d, &grid, &mut rng)
        })
        .reduce(Partial::default, Partial::combine);

    let border = (0..side_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, STREAM_BORDER, i as u64);
            border_partial(flow, d, &grid, &mut rng)
        })
        .reduce(Partial::default, Partial::combine);

    let total = trajectories.combine(fixity).combine(border);
    report.max_surface_residual = total.surface;
    report.max_endpoint_defect = total.endpoint;
    report.max_identity_defect = total.identity;
    report.max_fixedpoint_drift = total.fixity;
    report.max_border_mismatch = total.border;
    report.endpoint_locate_failures = total.locate_failures;
    report.degenerate_ray_samples = total.degenerate;
    report.seal()
}

/// Runs the full retraction over `samples` random surface points and a
/// uniform time grid of `steps` points, checking surface membership along
/// trajectories, exact identity at t = 0, skeleton membership at t = 1,
/// fixity of skeleton points, and continuity across region borders.
pub fn verify_retraction(
    d: u32,
    samples: usize,
    seed: u64,
    tolerance: f64,
    steps: usize,
) -> RetractionReport {
    verify_retraction_impl(PlanarFlow::Standard, d, samples, seed, tolerance, steps)
}

/// Negative control: runs the same harness over a deliberately broken
/// planar flow (t·Re w + (1−t)·i·Im w), which is not the identity at t = 0.
/// A healthy harness returns a failing report.
pub fn verify_retraction_flawed_planar(
    d: u32,
    samples: usize,
    seed: u64,
    tolerance: f64,
    steps: usize,
) -> RetractionReport {
    verify_retraction_impl(PlanarFlow::SwappedWeights, d, samples, seed, tolerance, steps)
}

/// Smallest max-coordinate distance between `b` and μ·`a` over all d-th
/// roots of unity μ: the coordinate mismatch of two projective endpoints.
fn projective_distance(a: &ComplexTriple, b: &ComplexTriple, d: u32) -> f64 {
    (0..d)
        .map(|m| {
            let mu = Complex64::from_polar(1.0, TAU * m as f64 / d as f64);
            b.distance(&a.scale(mu))
        })
        .fold(f64::INFINITY, f64::min)
}

fn projective_partial(d: u32, seed: u64, index: u64, law: TwistLaw) -> Partial {
    let mut rng = stream_rng(seed, STREAM_TWIST, index);
    let mut out = Partial::default();
    let h = sample_surface_point(&mut rng, d);
    let m = rng.gen_range(0..d);

    let run = |p: &ComplexTriple, check: bool| -> Result<ComplexTriple, RetractionError> {
        Ok(retract_with(PlanarFlow::Standard, p, 1.0, d, check)?.0)
    };

    let outcome = (|| -> Result<f64, RetractionError> {
        let base = normalize_projective(&h, d)?;
        match law {
            TwistLaw::UnitRoot => {
                // Scaling a representative by a d-th root of unity keeps it
                // on the surface; both endpoints are computed with full
                // checks and must agree projectively.
                let lambda = Complex64::from_polar(1.0, TAU * m as f64 / d as f64);
                let e1 = run(&base, true)?;
                let e2 = run(&base.scale(lambda), true)?;
                let l1 = locate(&e1, d, LOCATE_TOL);
                let l2 = locate(&e2, d, LOCATE_TOL);
                match (l1, l2) {
                    (Ok((c1, _)), Ok((c2, _))) => {
                        if canonical_projective(&c1) != canonical_projective(&c2) {
                            return Ok(f64::INFINITY);
                        }
                    }
                    _ => return Ok(f64::INFINITY),
                }
                Ok(projective_distance(&e1, &e2, d))
            }
            TwistLaw::HalfRoot => {
                // The broken law scales by a 2d-th root that is not a d-th
                // root, silently trusting the (now false) surface invariant.
                let lambda = Complex64::from_polar(1.0, (TAU * m as f64 + PI) / d as f64);
                let e1 = run(&base, true)?;
                let e2 = run(&base.scale(lambda), false)?;
                if locate(&e2, d, LOCATE_TOL).is_err() {
                    return Ok(f64::INFINITY);
                }
                Ok(projective_distance(&e1, &e2, d))
            }
        }
    })();

    match outcome {
        Ok(mismatch) if mismatch.is_finite() => out.projective = mismatch,
        _ => {
            out.projective = f64::INFINITY;
            out.locate_failures += 1;
        }
    }
    out
}

#[derive(Clone, Copy)]
enum TwistLaw {
    UnitRoot,
    HalfRoot,
}

fn verify_projective_invariance_impl(
    law: TwistLaw,
    d: u32,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> RetractionReport {
    let mut report = RetractionReport::new(d, samples, tolerance);
    if d == 0 {
        report.max_projective_mismatch = f64::INFINITY;
        return report.seal();
    }
    let total = (0..samples)
        .into_par_iter()
        .map(|i| projective_partial(d, seed, i as u64, law))
        .reduce(Partial::default, Partial::combine);
    report.max_projective_mismatch = total.projective;
    report.endpoint_locate_failures = total.locate_failures;
    report.seal()
}

/// Checks that the retraction endpoint of a projective representative does
/// not depend on the choice of representative: rescaling by a random d-th
/// root of unity must land in the same cell with coordinates matching up to
/// a common d-th root.
pub fn verify_projective_invariance(
    d: u32,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> RetractionReport {
    verify_projective_invariance_impl(TwistLaw::UnitRoot, d, samples, seed, tolerance)
}

/// Negative control: rescales by a 2d-th root of unity instead, the bug of
/// forgetting that only λ with λ^d = 1 preserve the surface. A healthy
/// harness returns a failing report.
pub fn verify_projective_invariance_flawed_twist(
    d: u32,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> RetractionReport {
    verify_projective_invariance_impl(TwistLaw::HalfRoot, d, samples, seed, tolerance)
}
