//! Cut locus of the origin, cut times, distance on the cut locus and sphere
//! profiles.
//!
//! A point `(x, t)` is a cut point iff `t ≠ 0` and `x ⊥ supp(t)`. Its distance
//! from the origin is `√(|x|² + R(θ)|t|)` with `θ = P⁻¹(|x|²/|t|)`, and it is
//! reached by a one-parameter family of minimizers indexed by an angle `σ`.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::algebra::{factorize, GroupPoint, Vec3};
use crate::error::{Error, Result};
use crate::geodesics::{
    change_vars_inverse, endpoint_g, extremal_point, length, AdmissibleTriple, ExtremalParams,
};
use crate::scalars::{p_inv, q_inv, r as r_fn, solve_p_all, Suvw};

/// Default relative tolerance for cut-locus membership.
pub const DEFAULT_CUT_TOL: f64 = 1e-9;

/// Tolerance used when a cut point is produced by [`cut_point`].
pub const GENERATED_CUT_TOL: f64 = 1e-8;

/// `|t| > tol` and `x` orthogonal to both factors of `t` within
/// `tol·max(1, |x|)·|t|^{1/2}`.
pub fn is_cut(p: &GroupPoint, tol: f64) -> bool {
    let nt = p.t.norm();
    if !(nt > tol) {
        return false;
    }
    let Ok((y, yp)) = factorize(&p.t) else {
        return false;
    };
    let bound = tol * p.x.norm().max(1.0) * nt.sqrt();
    p.x.dot(&y).abs() <= bound && p.x.dot(&yp).abs() <= bound
}

/// `|t| ≤ tol·max(1, |x|²)`: the endpoint set of abnormal extremals is `t = 0`.
pub fn is_abnormal_point(p: &GroupPoint, tol: f64) -> bool {
    p.t.norm() <= tol * p.x.norm_squared().max(1.0)
}

/// A validated cut point with the data reused by the distance formula and the
/// minimizer family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoint {
    point: GroupPoint,
    theta: f64,
    near_pole: bool,
    y: Vec3,
    y_perp: Vec3,
}

impl CutPoint {
    pub fn new(point: GroupPoint) -> Result<Self> {
        Self::with_tol(point, DEFAULT_CUT_TOL)
    }

    pub fn with_tol(point: GroupPoint, tol: f64) -> Result<Self> {
        if !point.is_finite() {
            return Err(Error::NotCutPoint("non-finite coordinates".into()));
        }
        if !is_cut(&point, tol) {
            let nt = point.t.norm();
            let reason = if nt <= tol {
                format!("|t| = {nt:e} does not exceed {tol:e}")
            } else {
                "x is not orthogonal to supp(t)".to_string()
            };
            return Err(Error::NotCutPoint(reason));
        }
        let (y, y_perp) = factorize(&point.t)?;
        let root = p_inv(point.x.norm_squared() / point.t.norm())?;
        Ok(Self {
            point,
            theta: root.theta,
            near_pole: root.near_pole,
            y,
            y_perp,
        })
    }

    pub fn point(&self) -> &GroupPoint {
        &self.point
    }

    /// `θ = P⁻¹(|x|²/|t|) ∈ [π, φ₁)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// True when `θ` was capped just below `φ₁`.
    pub fn near_pole(&self) -> bool {
        self.near_pole
    }

    /// Factorization `t = y∧y⊥` fixed at construction.
    pub fn factors(&self) -> (&Vec3, &Vec3) {
        (&self.y, &self.y_perp)
    }
}

/// Cut time of an extremal; straight lines never lose minimality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutTime {
    Finite(f64),
    Infinite,
}

impl CutTime {
    pub fn is_finite(&self) -> bool {
        matches!(self, CutTime::Finite(_))
    }

    /// The cut time as a float, `+∞` for [`CutTime::Infinite`].
    pub fn value(&self) -> f64 {
        match self {
            CutTime::Finite(v) => *v,
            CutTime::Infinite => f64::INFINITY,
        }
    }
}

/// `h_cut(μ) = Q⁻¹(μ²) ∈ [π, φ₁)`.
pub fn h_cut(mu: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::Domain {
            what: "mu",
            constraint: ">= 0",
            value: mu,
        });
    }
    Ok(q_inv(mu * mu)?.theta)
}

/// `h_cut(|z|/|a|)/φ`, infinite when `φ = 0` or `a = 0`.
pub fn t_cut(params: &ExtremalParams) -> CutTime {
    let tr = &params.triple;
    if params.phi == 0.0 || tr.is_straight() {
        return CutTime::Infinite;
    }
    let mu = tr.z().norm() / tr.a().norm();
    let h = h_cut(mu).expect("mu is a finite nonnegative ratio");
    CutTime::Finite(h / params.phi)
}

/// Endpoint of the extremal at its cut time.
pub fn cut_point(params: &ExtremalParams) -> Result<CutPoint> {
    let CutTime::Finite(s) = t_cut(params) else {
        return Err(Error::NoFiniteCutPoint);
    };
    CutPoint::with_tol(extremal_point(params, s), GENERATED_CUT_TOL)
}

/// `d(0, p) = √(|x|² + R(θ)|t|)`.
pub fn cut_distance(p: &CutPoint) -> f64 {
    distance_for_theta(p, p.theta)
}

fn distance_for_theta(p: &CutPoint, theta: f64) -> f64 {
    let rt = r_fn(theta).expect("theta is positive");
    (p.point.x.norm_squared() + rt * p.point.t.norm()).sqrt()
}

/// Member `σ` of the family of extremals through `p` with frequency `θ`.
fn family_member(p: &CutPoint, theta: f64, sigma: f64) -> ExtremalParams {
    let f = Suvw::eval(theta);
    let k = (f.u * f.w).sqrt().sqrt();
    let (sn, cs) = sigma.sin_cos();
    let x = &p.point.x;
    let along = p.y * cs + p.y_perp * sn;
    let alpha = (p.y * sn - p.y_perp * cs) / k;
    let beta = along * (k / f.w) - x * (f.v / f.w);
    let zeta = x * (f.u / f.w) - along * (f.s * k / f.w);
    let (a, b) = change_vars_inverse(&alpha, &beta, theta);
    ExtremalParams {
        triple: AdmissibleTriple::new_unchecked(a, b, zeta),
        phi: theta,
    }
}

/// Minimizer through `p` indexed by `σ`; its endpoint at `s = 1` is `p`.
pub fn extremal_family(p: &CutPoint, sigma: f64) -> ExtremalParams {
    family_member(p, p.theta, sigma)
}

/// One extremal through a cut point for each root of `P(θ) = |x|²/|t|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBranch {
    pub theta: f64,
    pub params: ExtremalParams,
    pub length: f64,
}

/// The `σ = 0` extremals for the roots in the first `kmax` brackets, sorted by `θ`.
pub fn minimizers_all_theta(p: &CutPoint, kmax: usize) -> Result<Vec<ThetaBranch>> {
    let v = p.point.x.norm_squared() / p.point.t.norm();
    let mut roots = solve_p_all(v, kmax)?;
    if let Some(first) = roots.first_mut() {
        // keep the first branch identical to the cached minimizer
        *first = p.theta;
    }
    Ok(roots
        .into_iter()
        .map(|theta| {
            let params = family_member(p, theta, 0.0);
            ThetaBranch {
                theta,
                params,
                length: distance_for_theta(p, theta),
            }
        })
        .collect())
}

/// Sampling grid for [`sphere_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    /// Samples of `θ` on `[0, h_cut(μ)]`, endpoints included.
    pub n_theta: usize,
    /// Values of `μ = |ζ|/|α|`: `0` followed by a geometric sequence up to `mu_max`.
    pub n_mu: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    /// Samples per Euler angle of the frame `(α, β, ζ)`; the tilt includes both poles.
    pub n_angle: usize,
    pub parallel: bool,
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self {
            n_theta: 16,
            n_mu: 8,
            mu_min: 1e-2,
            mu_max: 10.0,
            n_angle: 1,
            parallel: true,
        }
    }
}

impl SphereGrid {
    fn mus(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let m = self.n_mu - 1;
        for i in 0..m {
            let f = if m == 1 { 1.0 } else { i as f64 / (m - 1) as f64 };
            out.push(self.mu_min * (self.mu_max / self.mu_min).powf(f));
        }
        out
    }

    fn frames(&self) -> Vec<Matrix3<f64>> {
        use nalgebra::Rotation3;
        let n = self.n_angle;
        let tau = std::f64::consts::TAU;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let psi = tau * i as f64 / n as f64;
                    // both poles, so that opposite orientations of the support appear
                    let tilt = if n == 1 { 0.0 } else { std::f64::consts::PI * j as f64 / (n - 1) as f64 };
                    let omega = tau * k as f64 / n as f64;
                    let rot = Rotation3::from_axis_angle(&Vec3::z_axis(), psi)
                        * Rotation3::from_axis_angle(&Vec3::y_axis(), tilt)
                        * Rotation3::from_axis_angle(&Vec3::z_axis(), omega);
                    out.push(rot.into_inner());
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.n_theta == 0 || self.n_mu == 0 || self.n_angle == 0 {
            return Err(Error::Invalid("empty sphere grid".into()));
        }
        if self.n_mu > 1 && !(self.mu_min > 0.0 && self.mu_max >= self.mu_min && self.mu_max.is_finite()) {
            return Err(Error::Invalid(format!(
                "mu range must satisfy 0 < mu_min <= mu_max, got [{}, {}]",
                self.mu_min, self.mu_max
            )));
        }
        Ok(())
    }
}

/// Point of a sphere profile with its grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub point: GroupPoint,
    pub theta: f64,
    pub mu: f64,
    /// True on the boundary `θ = h_cut(μ)`.
    pub at_cut_cap: bool,
}

/// Samples of the sphere of radius `r`: endpoints of minimizers of length `r`
/// stopped no later than their cut time.
pub fn sphere_profile(r: f64, grid: &SphereGrid) -> Result<Vec<SpherePoint>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain {
            what: "r",
            constraint: "finite and > 0",
            value: r,
        });
    }
    grid.validate()?;
    let frames = grid.frames();
    let mus = grid.mus();
    let cells: Vec<(usize, usize)> = (0..frames.len())
        .flat_map(|f| (0..mus.len()).map(move |m| (f, m)))
        .collect();
    let cell = |&(f, m): &(usize, usize)| -> Result<Vec<SpherePoint>> {
        let frame = &frames[f];
        let mu = mus[m];
        let na = r / (1.0 + mu * mu).sqrt();
        let triple = AdmissibleTriple::new_unchecked(
            frame * Vec3::x() * na,
            frame * Vec3::y() * na,
            frame * Vec3::z() * (mu * na),
        );
        let cap = h_cut(mu)?;
        Ok((0..grid.n_theta)
            .map(|i| {
                let last = i + 1 == grid.n_theta;
                let theta = if grid.n_theta == 1 || last {
                    cap
                } else {
                    cap * i as f64 / (grid.n_theta - 1) as f64
                };
                SpherePoint {
                    point: endpoint_g(&triple, theta),
                    theta,
                    mu,
                    at_cut_cap: last,
                }
            })
            .collect())
    };
    let chunks: Vec<Result<Vec<SpherePoint>>> = if grid.parallel {
        cells.par_iter().map(cell).collect()
    } else {
        cells.iter().map(cell).collect()
    };
    let mut out = Vec::with_capacity(cells.len() * grid.n_theta);
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

/// Length of the family member `σ` on `[0, 1]`.
pub fn family_length(p: &CutPoint, sigma: f64) -> f64 {
    length(&extremal_family(p, sigma), 1.0).expect("unit time is nonnegative")
}
