//! Seeded random inputs shared by the verification routines and tests.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion};
use rand::Rng;

use crate::algebra::Vec3;
use crate::cutlocus::{cut_point, CutPoint};
use crate::geodesics::{AdmissibleTriple, ExtremalParams};

/// Uniformly distributed rotation (Shoemake's subgroup algorithm).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = Quaternion::new(
        b * (tau * u3).cos(),
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
    );
    UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner()
}

/// Uniform direction on the unit sphere.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    random_rotation(rng) * Vec3::x()
}

/// Admissible triple with `|a| ∈ [a_lo, a_hi]` and `|z| ∈ [0, z_hi]` in a random frame.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, a_lo: f64, a_hi: f64, z_hi: f64) -> AdmissibleTriple {
    let m = random_rotation(rng);
    let na = rng.gen_range(a_lo..=a_hi);
    let nz = rng.gen_range(0.0..=z_hi);
    AdmissibleTriple::new(m * Vec3::x() * na, m * Vec3::y() * na, m * Vec3::z() * nz)
        .expect("a rotated orthogonal frame is admissible")
}

/// Extremal parameters with `|a| ∈ [0.2, 2]`, `|z| ∈ [0, 2]`, `φ ∈ [0.1, 3]`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> ExtremalParams {
    let triple = random_triple(rng, 0.2, 2.0, 2.0);
    ExtremalParams::new(triple, rng.gen_range(0.1..=3.0)).expect("phi is positive")
}

/// Endpoint at the cut time of [`random_params`].
pub fn random_cut_point<R: Rng + ?Sized>(rng: &mut R) -> CutPoint {
    loop {
        if let Ok(p) = cut_point(&random_params(rng)) {
            return p;
        }
    }
}
