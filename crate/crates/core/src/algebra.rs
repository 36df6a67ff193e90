//! Vectors, bivectors and the group law of the free step-two group on three
//! generators.
//!
//! Two coordinate models are supported. The wedge model stores the vertical
//! layer as a bivector `t = t12 e1∧e2 + t13 e1∧e3 + t23 e2∧e3` and uses the law
//!
//! ```text
//! (x, t) · (ξ, τ) = (x + ξ, t + τ + ½ x∧ξ)
//! ```
//!
//! The cross model stores it as an ordinary vector and replaces `∧` by `×`.
//! The two are identified by `t23 ↦ t1, t13 ↦ -t2, t12 ↦ t3`, under which
//! `to_cross(y∧y') = y×y'`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A horizontal vector.
pub type Vec3 = Vector3<f64>;

/// Maximum entry of `|MᵀM - I|` accepted for rotation inputs.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Element of `∧²V` in the frame `e1∧e2, e1∧e3, e2∧e3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivec3 {
    pub t12: f64,
    pub t13: f64,
    pub t23: f64,
}

impl Bivec3 {
    pub const fn new(t12: f64, t13: f64, t23: f64) -> Self {
        Self { t12, t13, t23 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn e12() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub fn e13() -> Self {
        Self::new(0.0, 1.0, 0.0)
    }

    pub fn e23() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    /// Inner product making `e_j∧e_k` orthonormal.
    pub fn inner(&self, other: &Bivec3) -> f64 {
        self.t12 * other.t12 + self.t13 * other.t13 + self.t23 * other.t23
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.t12.is_finite() && self.t13.is_finite() && self.t23.is_finite()
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.t12, self.t13, self.t23]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Cross-model dual `(t23, -t13, t12)`.
    pub fn to_dual(&self) -> Vec3 {
        Vec3::new(self.t23, -self.t13, self.t12)
    }

    pub fn from_dual(v: &Vec3) -> Self {
        Self::new(v.z, -v.y, v.x)
    }
}

impl Add for Bivec3 {
    type Output = Bivec3;
    fn add(self, o: Bivec3) -> Bivec3 {
        Bivec3::new(self.t12 + o.t12, self.t13 + o.t13, self.t23 + o.t23)
    }
}

impl AddAssign for Bivec3 {
    fn add_assign(&mut self, o: Bivec3) {
        *self = *self + o;
    }
}

impl Sub for Bivec3 {
    type Output = Bivec3;
    fn sub(self, o: Bivec3) -> Bivec3 {
        Bivec3::new(self.t12 - o.t12, self.t13 - o.t13, self.t23 - o.t23)
    }
}

impl Neg for Bivec3 {
    type Output = Bivec3;
    fn neg(self) -> Bivec3 {
        Bivec3::new(-self.t12, -self.t13, -self.t23)
    }
}

impl Mul<f64> for Bivec3 {
    type Output = Bivec3;
    fn mul(self, s: f64) -> Bivec3 {
        Bivec3::new(self.t12 * s, self.t13 * s, self.t23 * s)
    }
}

impl Mul<Bivec3> for f64 {
    type Output = Bivec3;
    fn mul(self, t: Bivec3) -> Bivec3 {
        t * self
    }
}

/// `x∧y`, with components `x_j y_k - x_k y_j` for `j < k`.
pub fn wedge(x: &Vec3, y: &Vec3) -> Bivec3 {
    Bivec3::new(
        x.x * y.y - x.y * y.x,
        x.x * y.z - x.z * y.x,
        x.y * y.z - x.z * y.y,
    )
}

pub fn bivec_inner(s: &Bivec3, t: &Bivec3) -> f64 {
    s.inner(t)
}

/// Unit normal `n` of the support plane, `supp(t) = n⊥`.
pub fn support_normal(t: &Bivec3) -> Result<Vec3> {
    let d = t.to_dual();
    let n = d.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroBivector);
    }
    Ok(d / n)
}

/// Deterministic factorization `t = y∧y⊥` with `y ⊥ y⊥` and `|y|² = |y⊥|² = |t|`.
///
/// The direction of `y` is the projection onto `supp(t)` of the coordinate
/// axis least aligned with the support normal; `y⊥ = n × y`.
pub fn factorize(t: &Bivec3) -> Result<(Vec3, Vec3)> {
    let n = support_normal(t)?;
    let mut axis = 0;
    for j in 1..3 {
        if n[j].abs() < n[axis].abs() {
            axis = j;
        }
    }
    let mut e = Vec3::zeros();
    e[axis] = 1.0;
    let dir = (e - n * n[axis]).normalize();
    let dir_perp = n.cross(&dir);
    let r = t.norm().sqrt();
    Ok((dir * r, dir_perp * r))
}

/// Point of the group in the wedge model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x: Vec3,
    pub t: Bivec3,
}

impl GroupPoint {
    pub fn new(x: Vec3, t: Bivec3) -> Self {
        Self { x, t }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_coords(c: [f64; 6]) -> Self {
        Self::new(Vec3::new(c[0], c[1], c[2]), Bivec3::new(c[3], c[4], c[5]))
    }

    /// `(x1, x2, x3, t12, t13, t23)`.
    pub fn coords(&self) -> [f64; 6] {
        [self.x.x, self.x.y, self.x.z, self.t.t12, self.t.t13, self.t.t23]
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite()) && self.t.is_finite()
    }

    pub fn mul(&self, q: &GroupPoint) -> GroupPoint {
        GroupPoint::new(self.x + q.x, self.t + q.t + wedge(&self.x, &q.x) * 0.5)
    }

    pub fn inverse(&self) -> GroupPoint {
        GroupPoint::new(-self.x, -self.t)
    }

    pub fn dilate(&self, r: f64) -> Result<GroupPoint> {
        dilate(r, self)
    }

    pub fn to_cross(&self) -> CrossPoint {
        to_cross(self)
    }

    /// Euclidean distance between coordinate vectors in ℝ⁶.
    pub fn euclidean_distance(&self, q: &GroupPoint) -> f64 {
        ((self.x - q.x).norm_squared() + (self.t - q.t).norm_squared()).sqrt()
    }
}

pub fn group_mul(p: &GroupPoint, q: &GroupPoint) -> GroupPoint {
    p.mul(q)
}

/// `δ_r(x, t) = (r x, r² t)`.
pub fn dilate(r: f64, p: &GroupPoint) -> Result<GroupPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonPositiveDilation(r));
    }
    Ok(GroupPoint::new(p.x * r, p.t * (r * r)))
}

pub fn check_orthogonal(m: &Matrix3<f64>) -> Result<()> {
    let dev = (m.transpose() * m - Matrix3::identity()).abs().max();
    if !(dev <= ORTHOGONALITY_TOL) {
        return Err(Error::NotOrthogonal(dev));
    }
    Ok(())
}

/// `(M x, (M y)∧(M y'))` for `t = y∧y'`.
///
/// Evaluated through the dual vector: `M y × M y' = det(M) M (y × y')` for
/// orthogonal `M`, so no factorization is needed.
pub fn rotate(m: &Matrix3<f64>, p: &GroupPoint) -> Result<GroupPoint> {
    check_orthogonal(m)?;
    let det = m.determinant().signum();
    let t = Bivec3::from_dual(&(m * p.t.to_dual() * det));
    Ok(GroupPoint::new(m * p.x, t))
}

/// Point of the group in the cross model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CrossPoint {
    pub x: Vec3,
    pub t: Vec3,
}

impl CrossPoint {
    pub fn new(x: Vec3, t: Vec3) -> Self {
        Self { x, t }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_coords(c: [f64; 6]) -> Self {
        Self::new(Vec3::new(c[0], c[1], c[2]), Vec3::new(c[3], c[4], c[5]))
    }

    /// `(x1, x2, x3, t1, t2, t3)`.
    pub fn coords(&self) -> [f64; 6] {
        [self.x.x, self.x.y, self.x.z, self.t.x, self.t.y, self.t.z]
    }

    pub fn mul(&self, q: &CrossPoint) -> CrossPoint {
        CrossPoint::new(self.x + q.x, self.t + q.t + self.x.cross(&q.x) * 0.5)
    }

    pub fn to_wedge(&self) -> GroupPoint {
        from_cross(self)
    }

    pub fn euclidean_distance(&self, q: &CrossPoint) -> f64 {
        ((self.x - q.x).norm_squared() + (self.t - q.t).norm_squared()).sqrt()
    }
}

pub fn to_cross(p: &GroupPoint) -> CrossPoint {
    CrossPoint::new(p.x, p.t.to_dual())
}

pub fn from_cross(p: &CrossPoint) -> GroupPoint {
    GroupPoint::new(p.x, Bivec3::from_dual(&p.t))
}

/// Rotation by `angle` about the unit `axis` (Rodrigues).
pub fn rotation_about(axis: &Vec3, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}
