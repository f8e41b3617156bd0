//! The two-stage retraction of the surface x^d + y^d + z^d = 1 onto its
//! compact skeleton, together form an explicit deformation retraction.
//!
//! Stage one flattens the imaginary part of each coordinate's d-th power,
//! working sector by sector through the branches of the d-th root. Stage two
//! moves the resulting power-real points inside the real plane p+q+r = 1
//! toward the closed triangle of non-negative triples, transporting each
//! coordinate along its fixed ray. Conventions that the code relies on:
//!
//! * the complex plane splits into 2d closed sectors of angle π/d; sector k
//!   (1-based) covers arguments [(k−1)π/d, kπ/d];
//! * odd sectors are parametrized from the closed upper half-plane with
//!   θ ∈ [0, π], even sectors from the closed lower half-plane with
//!   θ ∈ [π, 2π], so adjacent parametrizations agree on the shared edges;
//! * boundary arguments that are exact multiples of π/d belong to the
//!   lower-numbered sector, except argument 0 which belongs to sector 1.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use thiserror::Error;

/// Membership tolerance for the surface equation x^d + y^d + z^d = 1.
pub const SURFACE_TOL: f64 = 1e-9;
/// Tolerance for treating coordinate powers as real, and for region signs.
pub const POWER_REAL_TOL: f64 = 1e-8;
/// Tolerance for half-plane and sector domain checks.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Error, Debug)]
pub enum RetractionError {
    #[error("time parameter {0} outside [0, 1]")]
    InvalidTime(f64),
    #[error("point is off the degree-{degree} surface (defect {defect:.3e})")]
    NotOnSurface { degree: u32, defect: f64 },
    #[error("coordinate powers are not real within tolerance (imaginary part {0:.3e})")]
    PowersNotReal(f64),
    #[error("point is off the plane x+y+z=1 (defect {0:.3e})")]
    NotOnPlane(f64),
    #[error("sector index {k} outside 1..={limit}")]
    InvalidSector { k: u32, limit: u32 },
    #[error("zero has no sector")]
    ZeroSector,
    #[error("input lies outside the stated half-plane or sector")]
    DomainViolation,
    #[error("sign pattern (-,-,-) cannot occur on the plane x+y+z=1")]
    ImpossibleRegion,
    #[error("point lies on the branch curve (power sum magnitude {0:.3e})")]
    OnCurve(f64),
    #[error("projective point must be nonzero")]
    ZeroPoint,
    #[error("degree must be at least 1")]
    ZeroDegree,
}

/// A point of C³, the ambient space of the surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexTriple {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl ComplexTriple {
    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        ComplexTriple { x, y, z }
    }

    pub fn from_coords(c: [Complex64; 3]) -> Self {
        ComplexTriple::new(c[0], c[1], c[2])
    }

    pub fn coords(&self) -> [Complex64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn powers(&self, d: u32) -> [Complex64; 3] {
        self.coords().map(|w| cpow(w, d))
    }

    pub fn power_sum(&self, d: u32) -> Complex64 {
        let p = self.powers(d);
        p[0] + p[1] + p[2]
    }

    /// |x^d + y^d + z^d − 1|
    pub fn surface_defect(&self, d: u32) -> f64 {
        (self.power_sum(d) - 1.0).norm()
    }

    /// Largest coordinate-wise distance to another triple.
    pub fn distance(&self, other: &ComplexTriple) -> f64 {
        let a = self.coords();
        let b = other.coords();
        (0..3).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> ComplexTriple {
        ComplexTriple::new(self.x * c, self.y * c, self.z * c)
    }
}

impl fmt::Display for ComplexTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// w^d by repeated multiplication (exact integer exponent).
pub fn cpow(w: Complex64, d: u32) -> Complex64 {
    w.powi(d as i32)
}

fn check_time(t: f64) -> Result<(), RetractionError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(RetractionError::InvalidTime(t));
    }
    Ok(())
}

fn check_degree(d: u32) -> Result<(), RetractionError> {
    if d == 0 {
        return Err(RetractionError::ZeroDegree);
    }
    Ok(())
}

/// Which planar map gets applied pointwise; the flawed variant exists only to
/// prove that the verification harness catches a broken flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PlanarFlow {
    /// w ↦ Re w + (1−t)·i·Im w
    Standard,
    /// w ↦ t·Re w + (1−t)·i·Im w, which is not the identity at t = 0.
    SwappedWeights,
}

pub(crate) fn flatten_with(flow: PlanarFlow, w: Complex64, t: f64) -> Complex64 {
    match flow {
        PlanarFlow::Standard => Complex64::new(w.re, (1.0 - t) * w.im),
        PlanarFlow::SwappedWeights => Complex64::new(t * w.re, (1.0 - t) * w.im),
    }
}

/// Flattens a complex number toward the real axis: w ↦ Re w + (1−t)·i·Im w.
/// The identity at t = 0, the projection onto the real part at t = 1.
pub fn flatten(w: Complex64, t: f64) -> Result<Complex64, RetractionError> {
    check_time(t)?;
    Ok(flatten_with(PlanarFlow::Standard, w, t))
}

/// Coordinate-wise flattening on the degree-1 surface x + y + z = 1.
pub fn retract_to_real(p: &ComplexTriple, t: f64) -> Result<ComplexTriple, RetractionError> {
    check_time(t)?;
    let defect = p.surface_defect(1);
    if defect > SURFACE_TOL {
        return Err(RetractionError::NotOnSurface { degree: 1, defect });
    }
    let c = p
        .coords()
        .map(|w| flatten_with(PlanarFlow::Standard, w, t));
    Ok(ComplexTriple::from_coords(c))
}

/// Sign region of a real point on the plane x + y + z = 1. `P` marks a
/// coordinate that is non-negative (within tolerance), `M` one that is
/// negative. All three negative is impossible on the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    PPP,
    PPM,
    PMP,
    MPP,
    PMM,
    MPM,
    MMP,
}

impl Region {
    pub fn signs(&self) -> [bool; 3] {
        match self {
            Region::PPP => [true, true, true],
            Region::PPM => [true, true, false],
            Region::PMP => [true, false, true],
            Region::MPP => [false, true, true],
            Region::PMM => [true, false, false],
            Region::MPM => [false, true, false],
            Region::MMP => [false, false, true],
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.signs().map(|p| if p { '+' } else { '-' });
        write!(f, "({},{},{})", s[0], s[1], s[2])
    }
}

fn region_from_signs(q: [f64; 3], tol: f64) -> Result<Region, RetractionError> {
    let p = q.map(|v| v >= -tol);
    match p {
        [true, true, true] => Ok(Region::PPP),
        [true, true, false] => Ok(Region::PPM),
        [true, false, true] => Ok(Region::PMP),
        [false, true, true] => Ok(Region::MPP),
        [true, false, false] => Ok(Region::PMM),
        [false, true, false] => Ok(Region::MPM),
        [false, false, true] => Ok(Region::MMP),
        [false, false, false] => Err(RetractionError::ImpossibleRegion),
    }
}

/// Classifies a real point of the plane x + y + z = 1 by coordinate signs,
/// counting coordinates within `tol` of zero as non-negative.
pub fn region_of(q: [f64; 3], tol: f64) -> Result<Region, RetractionError> {
    let plane_defect = (q[0] + q[1] + q[2] - 1.0).abs();
    if plane_defect > tol {
        return Err(RetractionError::NotOnPlane(plane_defect));
    }
    region_from_signs(q, tol)
}

fn target_for(region: Region, q: [f64; 3]) -> [f64; 3] {
    match region {
        Region::PPP => q,
        Region::PMM => [1.0, 0.0, 0.0],
        Region::MPM => [0.0, 1.0, 0.0],
        Region::MMP => [0.0, 0.0, 1.0],
        Region::PPM => {
            let s = 1.0 - q[2];
            [q[0] / s, q[1] / s, 0.0]
        }
        Region::PMP => {
            let s = 1.0 - q[1];
            [q[0] / s, 0.0, q[2] / s]
        }
        Region::MPP => {
            let s = 1.0 - q[0];
            [0.0, q[1] / s, q[2] / s]
        }
    }
}

/// Endpoint of the planar retraction: where the straight-line flow sends a
/// point of the plane at time 1. Points already in the closed triangle stay.
pub fn region_target(q: [f64; 3]) -> Result<[f64; 3], RetractionError> {
    let region = region_of(q, SURFACE_TOL)?;
    Ok(target_for(region, q))
}

fn planar_case(region: Region, q: [f64; 3], t: f64) -> [f64; 3] {
    if region == Region::PPP {
        return q;
    }
    let g = target_for(region, q);
    [0, 1, 2].map(|i| (1.0 - t) * q[i] + t * g[i])
}

/// Straight-line planar retraction toward the triangle of non-negative
/// triples: q ↦ (1−t)·q + t·target(q), the identity on the triangle itself.
pub fn retract_to_triangle(q: [f64; 3], t: f64) -> Result<[f64; 3], RetractionError> {
    check_time(t)?;
    let region = region_of(q, SURFACE_TOL)?;
    Ok(planar_case(region, q, t))
}

/// 1-based sector index of a nonzero complex number for the 2d sectors of
/// angle π/d. Boundary arguments go to the lower-numbered sector, except
/// argument 0 which starts sector 1.
pub fn sector_of(w: Complex64, d: u32) -> Result<u32, RetractionError> {
    check_degree(d)?;
    if w == Complex64::new(0.0, 0.0) {
        return Err(RetractionError::ZeroSector);
    }
    let a = w.arg();
    let arg = if a < 0.0 { a + TAU } else { a };
    let ratio = arg / (PI / d as f64);
    let nearest = ratio.round();
    let k = if (ratio - nearest).abs() <= 1e-9 && nearest >= 1.0 {
        nearest as i64
    } else {
        ratio.floor() as i64 + 1
    };
    Ok(k.clamp(1, 2 * d as i64) as u32)
}

fn check_sector_index(d: u32, k: u32) -> Result<(), RetractionError> {
    if k < 1 || k > 2 * d {
        return Err(RetractionError::InvalidSector { k, limit: 2 * d });
    }
    Ok(())
}

/// Angle of the lower edge of sector k.
fn sector_base(d: u32, k: u32) -> f64 {
    (k - 1) as f64 * PI / d as f64
}

fn half_plane_to_sector_raw(w: Complex64, d: u32, k: u32) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return w;
    }
    let a = w.arg();
    let df = d as f64;
    let angle = if k % 2 == 1 {
        // Upper half-plane, θ ∈ [0, π] up to boundary rounding.
        let theta = if a >= -FRAC_PI_2 { a } else { a + TAU };
        theta / df + sector_base(d, k)
    } else {
        // Lower half-plane, parametrized by θ ∈ [π, 2π].
        let theta = if a >= FRAC_PI_2 { a } else { a + TAU };
        (theta - PI) / df + sector_base(d, k)
    };
    Complex64::from_polar(w.norm().powf(1.0 / df), angle)
}

fn sector_to_half_plane_raw(w: Complex64, d: u32, k: u32) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return w;
    }
    let df = d as f64;
    let a = w.arg();
    // Re-center the argument near the sector before unfolding.
    let center = sector_base(d, k) + PI / (2.0 * df);
    let phi = a + TAU * ((center - a) / TAU).round();
    let theta = df * (phi - sector_base(d, k));
    let angle = if k % 2 == 1 { theta } else { theta + PI };
    Complex64::from_polar(w.norm().powi(d as i32), angle)
}

/// Homeomorphism from a closed half-plane onto sector k: the branch of the
/// d-th root that lands in sector k. Odd k reads its input from the upper
/// half-plane, even k from the lower.
pub fn half_plane_to_sector(w: Complex64, d: u32, k: u32) -> Result<Complex64, RetractionError> {
    check_degree(d)?;
    check_sector_index(d, k)?;
    let limit = DOMAIN_TOL * w.norm();
    let ok = if k % 2 == 1 {
        w.im >= -limit
    } else {
        w.im <= limit
    };
    if !ok {
        return Err(RetractionError::DomainViolation);
    }
    Ok(half_plane_to_sector_raw(w, d, k))
}

/// Inverse of [`half_plane_to_sector`]: the d-th power map restricted to
/// sector k, unfolded onto the matching closed half-plane.
pub fn sector_to_half_plane(w: Complex64, d: u32, k: u32) -> Result<Complex64, RetractionError> {
    check_degree(d)?;
    check_sector_index(d, k)?;
    if w != Complex64::new(0.0, 0.0) {
        let a = w.arg();
        let center = sector_base(d, k) + PI / (2.0 * d as f64);
        let phi = a + TAU * ((center - a) / TAU).round();
        let lo = sector_base(d, k) - DOMAIN_TOL;
        let hi = sector_base(d, k) + PI / d as f64 + DOMAIN_TOL;
        if phi < lo || phi > hi {
            return Err(RetractionError::DomainViolation);
        }
    }
    Ok(sector_to_half_plane_raw(w, d, k))
}

pub(crate) fn lift_flatten_with(
    flow: PlanarFlow,
    w: Complex64,
    t: f64,
    d: u32,
) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return w;
    }
    let k = sector_of(w, d).expect("nonzero input has a sector");
    let u = sector_to_half_plane_raw(w, d, k);
    let v = flatten_with(flow, u, t);
    if v == u {
        // The planar flow fixed the unfolded point, so the lift fixes w; in
        // particular t = 0 is exactly the identity.
        return w;
    }
    half_plane_to_sector_raw(v, d, k)
}

/// The flattening flow lifted through the d-th power map: on each sector it
/// conjugates [`flatten`] by the matching root branch, so the d-th power of
/// the output tracks the flattened d-th power of the input.
pub fn lift_flatten(w: Complex64, t: f64, d: u32) -> Result<Complex64, RetractionError> {
    check_time(t)?;
    check_degree(d)?;
    Ok(lift_flatten_with(PlanarFlow::Standard, w, t, d))
}

pub(crate) fn retract_to_power_real_with(
    flow: PlanarFlow,
    p: &ComplexTriple,
    t: f64,
    d: u32,
    check_surface: bool,
) -> Result<ComplexTriple, RetractionError> {
    check_time(t)?;
    check_degree(d)?;
    if check_surface {
        let defect = p.surface_defect(d);
        if defect > SURFACE_TOL {
            return Err(RetractionError::NotOnSurface { degree: d, defect });
        }
    }
    let c = p.coords().map(|w| lift_flatten_with(flow, w, t, d));
    Ok(ComplexTriple::from_coords(c))
}

/// Stage one of the retraction: flattens every coordinate's d-th power toward
/// the real axis while staying on the surface x^d + y^d + z^d = 1.
pub fn retract_to_power_real(
    p: &ComplexTriple,
    t: f64,
    d: u32,
) -> Result<ComplexTriple, RetractionError> {
    retract_to_power_real_with(PlanarFlow::Standard, p, t, d, true)
}

pub(crate) fn retract_to_skeleton_impl(
    p: &ComplexTriple,
    t: f64,
    d: u32,
    check: bool,
) -> Result<(ComplexTriple, bool), RetractionError> {
    check_time(t)?;
    check_degree(d)?;
    let powers = p.powers(d);
    if check {
        let worst_im = powers.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
        if worst_im > POWER_REAL_TOL {
            return Err(RetractionError::PowersNotReal(worst_im));
        }
        let sum: f64 = powers.iter().map(|w| w.re).sum();
        let defect = (sum - 1.0).abs();
        if defect > POWER_REAL_TOL {
            return Err(RetractionError::NotOnSurface { degree: d, defect });
        }
    }
    let q = powers.map(|w| w.re);
    // Sign classification must be strict: a power that is negative by any
    // amount has to flow to zero by t = 1, or the endpoint misses the
    // skeleton. Only an exact zero marks a coordinate as already resting
    // on it (and realized skeleton points store exact zeros).
    let region = region_from_signs(q, 0.0)?;
    if region == Region::PPP {
        return Ok((*p, false));
    }
    let s = planar_case(region, q, t);
    let c = p.coords();
    let mut degenerate = false;
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        if s[i] == q[i] {
            // The planar value did not move, so the coordinate stays put.
            out[i] = c[i];
        } else {
            let n = c[i].norm();
            let dir = if n == 0.0 {
                // A vanished coordinate that must grow has no ray of its
                // own; fall back to the positive real ray and flag it.
                degenerate = true;
                Complex64::new(1.0, 0.0)
            } else {
                c[i] / n
            };
            out[i] = dir * s[i].abs().powf(1.0 / d as f64);
        }
    }
    Ok((ComplexTriple::from_coords(out), degenerate))
}

/// Stage two of the retraction: each coordinate's real d-th power follows the
/// planar triangle retraction while the coordinate slides along its own ray.
/// Requires all three d-th powers real (within tolerance) and summing to 1.
pub fn retract_to_skeleton(
    p: &ComplexTriple,
    t: f64,
    d: u32,
) -> Result<ComplexTriple, RetractionError> {
    Ok(retract_to_skeleton_impl(p, t, d, true)?.0)
}

pub(crate) fn retract_with(
    flow: PlanarFlow,
    p: &ComplexTriple,
    t: f64,
    d: u32,
    check_surface: bool,
) -> Result<(ComplexTriple, bool), RetractionError> {
    check_time(t)?;
    check_degree(d)?;
    if t <= 0.5 {
        let img = retract_to_power_real_with(flow, p, 2.0 * t, d, check_surface)?;
        Ok((img, false))
    } else {
        let q = retract_to_power_real_with(flow, p, 1.0, d, check_surface)?;
        retract_to_skeleton_impl(&q, 2.0 * t - 1.0, d, false)
    }
}

/// The full deformation retraction of the surface onto its skeleton: stage
/// one on t ∈ [0, ½], stage two on t ∈ [½, 1]. At t = 0 this is exactly the
/// identity; at t = 1 every point lands on the skeleton.
pub fn retract(p: &ComplexTriple, t: f64, d: u32) -> Result<ComplexTriple, RetractionError> {
    Ok(retract_with(PlanarFlow::Standard, p, t, d, true)?.0)
}

/// Rescales a nonzero projective representative onto the surface
/// x^d + y^d + z^d = 1 using the principal d-th root of the reciprocal power
/// sum. Fails on representatives of points of the branch curve, where the
/// power sum vanishes.
pub fn normalize_projective(
    p: &ComplexTriple,
    d: u32,
) -> Result<ComplexTriple, RetractionError> {
    check_degree(d)?;
    let scale: f64 = p.coords().iter().map(|w| w.norm().powi(d as i32)).sum();
    if scale == 0.0 {
        return Err(RetractionError::ZeroPoint);
    }
    let sum = p.power_sum(d);
    if sum.norm() <= 1e-12 * scale {
        return Err(RetractionError::OnCurve(sum.norm()));
    }
    let inv = 1.0 / sum;
    let lambda = Complex64::from_polar(inv.norm().powf(1.0 / d as f64), inv.arg() / d as f64);
    Ok(p.scale(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {b}, got {a} (distance {:.3e})",
            (a - b).norm()
        );
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten(c(3.0, 2.0), 1.0).unwrap(), c(3.0, 0.0));
        let w = c(0.25, -1.75);
        assert_eq!(flatten(w, 0.0).unwrap(), w);
        assert_eq!(flatten(c(1.0, 1.0), 0.5).unwrap(), c(1.0, 0.5));
        assert!(matches!(
            flatten(w, 1.5),
            Err(RetractionError::InvalidTime(_))
        ));
        assert!(matches!(
            flatten(w, -0.1),
            Err(RetractionError::InvalidTime(_))
        ));
    }

    #[test]
    fn retract_to_real_stays_on_plane() {
        // x + y + z = 1 with complex entries.
        let p = ComplexTriple::new(c(0.5, 1.0), c(0.25, -0.5), c(0.25, -0.5));
        for t in [0.0, 0.3, 1.0] {
            let r = retract_to_real(&p, t).unwrap();
            assert!(r.surface_defect(1) <= 1e-12);
        }
        let r = retract_to_real(&p, 1.0).unwrap();
        assert_eq!(r, ComplexTriple::new(c(0.5, 0.0), c(0.25, 0.0), c(0.25, 0.0)));
        let off = ComplexTriple::new(c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0));
        assert!(matches!(
            retract_to_real(&off, 0.5),
            Err(RetractionError::NotOnSurface { .. })
        ));
    }

    #[test]
    fn region_examples() {
        assert_eq!(region_of([0.2, 0.3, 0.5], 1e-9).unwrap(), Region::PPP);
        assert_eq!(region_of([0.6, 0.6, -0.2], 1e-9).unwrap(), Region::PPM);
        assert_eq!(region_of([1.5, -0.2, -0.3], 1e-9).unwrap(), Region::PMM);
        // Zero counts as non-negative.
        assert_eq!(region_of([0.0, 1.0, 0.0], 1e-9).unwrap(), Region::PPP);
        assert!(matches!(
            region_of([0.2, 0.3, 0.4], 1e-9),
            Err(RetractionError::NotOnPlane(_))
        ));
    }

    #[test]
    fn region_target_examples() {
        let t = region_target([0.6, 0.6, -0.2]).unwrap();
        let s = 1.2;
        assert!((t[0] - 0.6 / s).abs() < 1e-15);
        assert!((t[1] - 0.6 / s).abs() < 1e-15);
        assert_eq!(t[2], 0.0);
        assert_eq!(region_target([1.5, -0.2, -0.3]).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(region_target([0.2, 0.3, 0.5]).unwrap(), [0.2, 0.3, 0.5]);
    }

    #[test]
    fn triangle_flow_examples() {
        let r = retract_to_triangle([0.6, 0.6, -0.2], 0.5).unwrap();
        assert!((r[0] - 0.55).abs() < 1e-15);
        assert!((r[1] - 0.55).abs() < 1e-15);
        assert!((r[2] + 0.1).abs() < 1e-15);
        // Identity on the closed triangle, bitwise.
        assert_eq!(retract_to_triangle([0.2, 0.3, 0.5], 0.7).unwrap(), [0.2, 0.3, 0.5]);
    }

    #[test]
    fn border_agreement_of_planar_cases() {
        // A point on the border x = 0 between (+,+,-) and (-,+,-): both case
        // formulas must agree there. With q = (0, y, z), y + z = 1:
        // (+,+,-): (1-t+t/(1-z))·y and (-,+,-): (1-t)·y + t agree because
        // 1 - z = y.
        let q = [0.0, 1.3, -0.3];
        for t in [0.0, 0.25, 0.6, 1.0] {
            let a = planar_case(Region::PPM, q, t);
            let b = planar_case(Region::MPM, q, t);
            for i in 0..3 {
                assert!(
                    (a[i] - b[i]).abs() <= 1e-12,
                    "mismatch at t={t}: {a:?} vs {b:?}"
                );
            }
        }
        // Same for the border z = 0 between (+,+,-) and the identity region.
        let q = [0.4, 0.6, 0.0];
        for t in [0.0, 0.25, 0.6, 1.0] {
            let a = planar_case(Region::PPM, q, t);
            let b = planar_case(Region::PPP, q, t);
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn sector_examples() {
        // d = 3: argument 0.3 rad sits inside the first sector [0, π/3].
        assert_eq!(sector_of(Complex64::from_polar(2.0, 0.3), 3).unwrap(), 1);
        // d = 2: e^{3iπ/4} sits in sector 2, [π/2, π].
        assert_eq!(sector_of(Complex64::from_polar(1.0, 3.0 * PI / 4.0), 2).unwrap(), 2);
        // Boundary: i has argument π/2, the shared edge of sectors 1 and 2
        // for d = 2; the lower sector wins.
        assert_eq!(sector_of(c(0.0, 1.0), 2).unwrap(), 1);
        // Argument 0 starts sector 1.
        assert_eq!(sector_of(c(2.5, 0.0), 2).unwrap(), 1);
        // Negative real axis: argument π, lower sector d (not d+1).
        assert_eq!(sector_of(c(-1.0, 0.0), 3).unwrap(), 3);
        assert!(matches!(
            sector_of(c(0.0, 0.0), 3),
            Err(RetractionError::ZeroSector)
        ));
    }

    #[test]
    fn root_branch_example_even_sector() {
        // d = 2, k = 2: the lower half-plane boundary point -1 has θ = π and
        // maps to e^{i((π-π)/2 + π/2)} = i.
        let out = half_plane_to_sector(c(-1.0, 0.0), 2, 2).unwrap();
        assert_close(out, c(0.0, 1.0), 1e-15);
    }

    #[test]
    fn root_branches_are_mutually_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=5u32 {
            for k in 1..=2 * d {
                for _ in 0..1000 {
                    // Random point of sector k.
                    let base = sector_base(d, k);
                    let ang = base + rng.gen_range(0.0..=1.0) * PI / d as f64;
                    let w = Complex64::from_polar(rng.gen_range(0.05..3.0), ang);
                    let u = sector_to_half_plane(w, d, k).unwrap();
                    // The unfolded point lies in the right half-plane.
                    if k % 2 == 1 {
                        assert!(u.im >= -1e-9 * u.norm());
                    } else {
                        assert!(u.im <= 1e-9 * u.norm());
                    }
                    let back = half_plane_to_sector(u, d, k).unwrap();
                    assert!((back - w).norm() <= 1e-12 * w.norm().max(1.0));
                    let again = sector_to_half_plane(back, d, k).unwrap();
                    assert!((again - u).norm() <= 1e-12 * u.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn root_branch_domain_checks() {
        assert!(matches!(
            half_plane_to_sector(c(1.0, -0.5), 2, 1),
            Err(RetractionError::DomainViolation)
        ));
        assert!(matches!(
            half_plane_to_sector(c(1.0, 0.5), 2, 2),
            Err(RetractionError::DomainViolation)
        ));
        // Sector 1 of d = 2 is the first quadrant; -1 is far outside.
        assert!(matches!(
            sector_to_half_plane(c(-1.0, 0.0), 2, 1),
            Err(RetractionError::DomainViolation)
        ));
        assert!(matches!(
            half_plane_to_sector(c(1.0, 0.0), 2, 5),
            Err(RetractionError::InvalidSector { .. })
        ));
    }

    #[test]
    fn lifted_flatten_example() {
        // d = 2: w = 1 + i has square 2i; flattening the square at t = ½
        // gives i, whose sector-1 root is e^{iπ/4}.
        let g = lift_flatten(c(1.0, 1.0), 0.5, 2).unwrap();
        let expected = Complex64::from_polar(1.0, PI / 4.0);
        assert_close(g, expected, 1e-12);
    }

    #[test]
    fn lifted_flatten_collapses_pure_imaginary_square() {
        // d = 2: e^{iπ/4} squares to i, which flattens to 0 at t = 1. The
        // residual real part of the computed square is ~1e-16 and taking the
        // square root amplifies it to ~1e-8, so the bound is loose.
        let g = lift_flatten(Complex64::from_polar(1.0, PI / 4.0), 1.0, 2).unwrap();
        assert!(g.norm() <= 1e-7, "norm {:.3e}", g.norm());
    }

    #[test]
    fn lifted_flatten_identity_at_zero_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=6u32 {
            for _ in 0..200 {
                let w = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let g = lift_flatten(w, 0.0, d).unwrap();
                assert_eq!(g, w, "t = 0 must fix the input bitwise");
            }
        }
    }

    #[test]
    fn lifted_flatten_tracks_flattened_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for d in 1..=6u32 {
            for _ in 0..2000 {
                let w = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let t = rng.gen_range(0.0..=1.0);
                let g = lift_flatten(w, t, d).unwrap();
                let lhs = cpow(g, d);
                let rhs = flatten(cpow(w, d), t).unwrap();
                assert!(
                    (lhs - rhs).norm() <= 1e-10,
                    "d={d} w={w} t={t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn lifted_flatten_degree_one_is_planar_flatten() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let w = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let t = rng.gen_range(0.0..=1.0);
            let g = lift_flatten(w, t, 1).unwrap();
            let f = flatten(w, t).unwrap();
            assert!((g - f).norm() <= 1e-12);
        }
    }

    #[test]
    fn lifted_flatten_fixes_zero() {
        for d in 1..=4u32 {
            assert_eq!(lift_flatten(c(0.0, 0.0), 0.7, d).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn skeleton_stage_examples() {
        // All powers already non-negative: the map is the identity, bitwise.
        let p = ComplexTriple::new(
            Complex64::from_polar(0.6f64.sqrt(), PI),
            c(0.2f64.sqrt(), 0.0),
            c(0.2f64.sqrt(), 0.0),
        );
        assert!(p.surface_defect(2) < 1e-12);
        let r = retract_to_skeleton(&p, 0.8, 2).unwrap();
        assert_eq!(r, p);

        // Powers (-0.2, -0.3, 1.5) for d = 2: x and y sit on the imaginary
        // rays and must vanish at t = 1 while z slides to its vertex.
        let p = ComplexTriple::new(
            c(0.0, 0.2f64.sqrt()),
            c(0.0, -(0.3f64.sqrt())),
            c(-(1.5f64.sqrt()), 0.0),
        );
        assert!(p.surface_defect(2) < 1e-12);
        let r = retract_to_skeleton(&p, 1.0, 2).unwrap();
        assert!(r.x.norm() <= 1e-12);
        assert!(r.y.norm() <= 1e-12);
        assert_close(r.z, c(-1.0, 0.0), 1e-12);
        // Halfway: the z power is (1-t)·1.5 + t·1 = 1.25.
        let r = retract_to_skeleton(&p, 0.5, 2).unwrap();
        assert_close(r.z, c(-(1.25f64.sqrt()), 0.0), 1e-12);
        assert_close(r.x, c(0.0, 0.1f64.sqrt()), 1e-12);

        let bad = ComplexTriple::new(c(1.0, 1.0), c(0.5, 0.0), c(0.5, 0.0));
        assert!(retract_to_skeleton(&bad, 0.5, 2).is_err());
    }

    #[test]
    fn full_retraction_is_identity_at_zero() {
        let p = ComplexTriple::new(
            c(0.3, 0.4),
            c(0.7, -0.2),
            // x + y + z = 1 for d = 1.
            c(1.0 - 0.3 - 0.7, -0.2),
        );
        let r = retract(&p, 0.0, 1).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn full_retraction_continuous_at_handoff() {
        let p = ComplexTriple::new(
            c(0.0, 0.2f64.sqrt()),
            c(0.0, -(0.3f64.sqrt())),
            c(1.5f64.sqrt(), 0.0),
        );
        let a = retract(&p, 0.5, 2).unwrap();
        let b = retract(&p, 0.5 + 1e-12, 2).unwrap();
        assert!(a.distance(&b) <= 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let p = ComplexTriple::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let n = normalize_projective(&p, 2).unwrap();
        let s = 1.0 / 3.0f64.sqrt();
        assert_close(n.x, c(s, 0.0), 1e-15);
        assert!(n.surface_defect(2) <= 1e-15);

        let p = ComplexTriple::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let n = normalize_projective(&p, 3).unwrap();
        assert_close(n.x, c(1.0, 0.0), 1e-15);

        // On the branch curve: 1 + i² + 0 = 0.
        let p = ComplexTriple::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        assert!(matches!(
            normalize_projective(&p, 2),
            Err(RetractionError::OnCurve(_))
        ));

        assert!(matches!(
            normalize_projective(&ComplexTriple::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), 2),
            Err(RetractionError::ZeroPoint)
        ));
    }

    #[test]
    fn flawed_flow_is_not_identity_at_zero() {
        let w = c(1.0, 0.5);
        let v = flatten_with(PlanarFlow::SwappedWeights, w, 0.0);
        assert!((v - w).norm() > 0.4);
    }
}
