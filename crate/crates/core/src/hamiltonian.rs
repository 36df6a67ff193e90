//! Hamiltonian picture in the cross-product model.
//!
//! With momentum `(ξ, τ)` at `q = (x, t)` the horizontal components are
//! `u_j = ξ_j + ½⟨τ, x × e_j⟩` and `H = ½|u|²`. Along the flow `τ` is constant
//! and `u̇ = τ × u`, so the control rotates about `τ` with angular speed `|τ|`.

use serde::{Deserialize, Serialize};

use crate::algebra::{to_cross, CrossPoint, Vec3};
use crate::cutlocus::{h_cut, CutTime};
use crate::error::{Error, Result};
use crate::geodesics::{extremal_point, AdmissibleTriple, ExtremalParams};

/// `|τ × ξ| ≤ PARALLEL_TOL·|τ||ξ|` counts as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Initial momentum at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Covector {
    pub xi: Vec3,
    pub tau: Vec3,
}

impl Covector {
    pub fn new(xi: Vec3, tau: Vec3) -> Self {
        Self { xi, tau }
    }

    pub fn is_finite(&self) -> bool {
        self.xi.iter().chain(self.tau.iter()).all(|c| c.is_finite())
    }

    /// True when `τ` and `ξ` are parallel up to [`PARALLEL_TOL`], including `τ = 0`.
    pub fn is_parallel(&self) -> bool {
        self.tau.cross(&self.xi).norm() <= PARALLEL_TOL * self.tau.norm() * self.xi.norm()
    }

    /// Membership in the strictly normal region `τ × ξ ≠ 0`.
    pub fn is_strictly_normal(&self) -> bool {
        !self.is_parallel()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.xi * s, self.tau * s)
    }
}

/// Horizontal components `u_j = ξ_j + ½⟨τ, x × e_j⟩`.
pub fn horizontal_components(q: &CrossPoint, p: &Covector) -> Vec3 {
    // ⟨τ, x × e_j⟩ = ⟨e_j, τ × x⟩
    p.xi + p.tau.cross(&q.x) * 0.5
}

/// `H(q, p) = ½ Σ_j ⟨p, Y_j(q)⟩²`.
pub fn hamiltonian(q: &CrossPoint, p: &Covector) -> f64 {
    0.5 * horizontal_components(q, p).norm_squared()
}

/// Extremal parameters of the curve generated by `p0`.
///
/// `λ = |τ|`, `a = ξ - ⟨ξ,τ̂⟩τ̂`, `b = τ̂ × ξ`, `z = ⟨ξ,τ̂⟩τ̂`, `φ = λ/2`. Parallel
/// covectors give the straight line with control `ξ`.
pub fn covector_to_extremal(p0: &Covector) -> ExtremalParams {
    if p0.is_parallel() {
        return ExtremalParams {
            triple: AdmissibleTriple::straight(p0.xi),
            phi: 0.0,
        };
    }
    let lambda = p0.tau.norm();
    let axis = p0.tau / lambda;
    let z = axis * p0.xi.dot(&axis);
    ExtremalParams {
        triple: AdmissibleTriple::new_unchecked(p0.xi - z, axis.cross(&p0.xi), z),
        phi: 0.5 * lambda,
    }
}

/// Closed-form exponential map `q(s, p0)`.
pub fn exp_map(p0: &Covector, s: f64) -> CrossPoint {
    to_cross(&extremal_point(&covector_to_extremal(p0), s))
}

/// Step count used when the caller has no preference.
pub fn default_steps(p0: &Covector, s: f64) -> usize {
    let n = (50.0 * s.abs() * (1.0 + p0.tau.norm())).ceil();
    (n as usize).max(100)
}

/// Classical RK4 on `u̇ = τ×u, ẋ = u, ṫ = ½ x×u` from `(0, 0)` with `u(0) = ξ`.
pub fn exp_map_ode(p0: &Covector, s: f64, steps: usize) -> Result<CrossPoint> {
    if steps < 1 {
        return Err(Error::Invalid("steps must be at least 1".into()));
    }
    let tau = p0.tau;
    let rhs = |st: &[Vec3; 3]| -> [Vec3; 3] {
        let [x, _, u] = st;
        [*u, x.cross(u) * 0.5, tau.cross(u)]
    };
    let axpy = |st: &[Vec3; 3], k: &[Vec3; 3], h: f64| -> [Vec3; 3] {
        [st[0] + k[0] * h, st[1] + k[1] * h, st[2] + k[2] * h]
    };
    let h = s / steps as f64;
    let mut st = [Vec3::zeros(), Vec3::zeros(), p0.xi];
    for _ in 0..steps {
        let k1 = rhs(&st);
        let k2 = rhs(&axpy(&st, &k1, h / 2.0));
        let k3 = rhs(&axpy(&st, &k2, h / 2.0));
        let k4 = rhs(&axpy(&st, &k3, h));
        for i in 0..3 {
            st[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    Ok(CrossPoint::new(st[0], st[1]))
}

/// `T_cut(ξ, τ) = (2/|τ|)·h_cut(|⟨ξ,τ⟩| / |τ×ξ|)`, infinite for parallel covectors.
pub fn cut_time(p0: &Covector) -> Result<CutTime> {
    if p0.xi.norm() == 0.0 {
        return Err(Error::ZeroCovector);
    }
    if p0.is_parallel() {
        return Ok(CutTime::Infinite);
    }
    let cross = p0.tau.cross(&p0.xi).norm();
    let mu = p0.xi.dot(&p0.tau).abs() / cross;
    Ok(CutTime::Finite(2.0 / p0.tau.norm() * h_cut(mu)?))
}
