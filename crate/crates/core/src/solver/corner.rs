//! Corner-like decrease of the distance at cut points.
//!
//! Starting from a cut point `(S β + ζ, α∧(U β + V ζ))` with `φ = h_cut(|ζ|/|α|)`,
//! the curve `σ ↦ G((1-c₁σ)α, (1-c₁σ)β, (1-c₂σ)ζ, φ-σ)` leaves the cut locus
//! orthogonally to `x̄`, and for `σ > 0` its points are reached by extremals
//! still before their cut time, so their distance is the exact length
//! `√((1-c₁σ)²|α|² + (1-c₂σ)²|ζ|²)`.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::algebra::{rotate, rotation_about, GroupPoint, Vec3};
use crate::cutlocus::{extremal_family, h_cut, CutPoint};
use crate::error::{Error, Result};
use crate::geodesics::{change_triple, endpoint_g, AdmissibleTriple};
use crate::scalars::{phi1, Suvw};
use crate::solver::shooting::{distance, ShootingConfig};

/// `(c₁, c₂)` making the corner curve leave the cut point orthogonally to `x̄`.
pub fn corner_coeffs(phi: f64) -> Result<(f64, f64)> {
    let pi = std::f64::consts::PI;
    if !(phi >= pi && phi < phi1()) {
        return Err(Error::Domain {
            what: "phi",
            constraint: "in [pi, phi_1[",
            value: phi,
        });
    }
    let f = Suvw::eval(phi);
    let (_, du, dv) = f.derivatives();
    let (s, u, v) = (f.s, f.u, f.v);
    let den = 2.0 * u * u - u * s * v - v * v * s * s;
    let c1 = (-2.0 * s * v.powi(3) - u * du + u * s * dv) / den;
    let c2 = v / u * (s * c1 - 2.0 * v);
    Ok((c1, c2))
}

/// Base cut point of a corner curve together with its coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerCurveParams {
    alpha: Vec3,
    beta: Vec3,
    zeta: Vec3,
    phi: f64,
    c1: f64,
    c2: f64,
}

impl CornerCurveParams {
    /// Uses the cut frequency `φ = h_cut(|ζ|/|α|)`.
    pub fn new(alpha: Vec3, beta: Vec3, zeta: Vec3) -> Result<Self> {
        let triple = AdmissibleTriple::new(alpha, beta, zeta)?;
        if triple.is_straight() {
            return Err(Error::Inadmissible("alpha must not vanish".into()));
        }
        let phi = h_cut(zeta.norm() / alpha.norm())?;
        let (c1, c2) = corner_coeffs(phi)?;
        Ok(Self {
            alpha,
            beta,
            zeta,
            phi,
            c1,
            c2,
        })
    }

    /// Corner curve through `p` built from its `σ = 0` minimizer.
    pub fn from_cut_point(p: &CutPoint) -> Result<Self> {
        let fam = extremal_family(p, 0.0);
        let g = change_triple(&fam.triple, fam.phi);
        Self::new(*g.a(), *g.b(), *g.z())
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn coeffs(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    pub fn frame(&self) -> (&Vec3, &Vec3, &Vec3) {
        (&self.alpha, &self.beta, &self.zeta)
    }

    /// `(x̄, t̄) = (S β + ζ, α∧(U β + V ζ))`.
    pub fn base(&self) -> GroupPoint {
        endpoint_g(&self.triple_at(0.0), self.phi)
    }

    /// `d(x̄, t̄) = √(|α|² + |ζ|²)`.
    pub fn base_distance(&self) -> f64 {
        (self.alpha.norm_squared() + self.zeta.norm_squared()).sqrt()
    }

    /// `K = c₁|α|² + c₂|ζ|²`.
    pub fn decrease_rate(&self) -> f64 {
        self.c1 * self.alpha.norm_squared() + self.c2 * self.zeta.norm_squared()
    }

    /// Largest `|σ|` accepted by [`corner_curve`]: both scale factors stay in
    /// `[½, 3/2]` and `φ - σ` stays in `[π - ½, φ₁ + ½]`.
    pub fn sigma_max(&self) -> f64 {
        let mut m: f64 = 0.5;
        for c in [self.c1, self.c2] {
            if c != 0.0 {
                m = m.min(0.5 / c.abs());
            }
        }
        m
    }

    fn triple_at(&self, sigma: f64) -> AdmissibleTriple {
        let a = 1.0 - self.c1 * sigma;
        let z = 1.0 - self.c2 * sigma;
        AdmissibleTriple::new_unchecked(self.alpha * a, self.beta * a, self.zeta * z)
    }

    /// `√((1-c₁σ)²|α|² + (1-c₂σ)²|ζ|²)`, the length of the extremal reaching
    /// the corner curve at `σ`.
    pub fn upper_bound(&self, sigma: f64) -> f64 {
        let t = self.triple_at(sigma);
        (t.a().norm_squared() + t.z().norm_squared()).sqrt()
    }

    /// True when the extremal reaching the curve at `σ` is stopped no later
    /// than its cut time, so [`Self::upper_bound`] is the exact distance.
    pub fn bound_is_exact(&self, sigma: f64) -> bool {
        let t = self.triple_at(sigma);
        let mu = t.z().norm() / t.a().norm();
        h_cut(mu).is_ok_and(|h| self.phi - sigma <= h)
    }
}

/// Point of the corner curve at `σ`.
pub fn corner_curve(base: &CornerCurveParams, sigma: f64) -> Result<GroupPoint> {
    let max = base.sigma_max();
    if !(sigma.abs() <= max) {
        return Err(Error::SigmaOutOfRange { sigma, max });
    }
    Ok(endpoint_g(&base.triple_at(sigma), base.phi - sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CornerSample {
    pub sigma: f64,
    pub upper_bound: f64,
    /// Independent shooting distance, when requested.
    pub shooting_distance: Option<f64>,
    /// `(d(x̄, t̄) - upper_bound)/σ`.
    pub slope: f64,
    /// `upper_bound ≤ d(x̄, t̄) - Cσ` with `C = K/(2d)·(1 - slack)`.
    pub estimate_holds: bool,
}

/// Tabulates the decrease of the distance along the corner curve.
pub fn corner_decrease_probe(
    base: &CornerCurveParams,
    sigmas: &[f64],
    slack: f64,
    shooting: Option<&ShootingConfig>,
) -> Result<Vec<CornerSample>> {
    let d = base.base_distance();
    let c = base.decrease_rate() / (2.0 * d) * (1.0 - slack);
    sigmas
        .iter()
        .map(|&sigma| {
            if !(sigma > 0.0) {
                return Err(Error::Domain {
                    what: "sigma",
                    constraint: "> 0",
                    value: sigma,
                });
            }
            let point = corner_curve(base, sigma)?;
            let ub = base.upper_bound(sigma);
            let shooting_distance = match shooting {
                Some(cfg) => Some(distance(&point, cfg)?.distance),
                None => None,
            };
            Ok(CornerSample {
                sigma,
                upper_bound: ub,
                shooting_distance,
                slope: (d - ub) / sigma,
                estimate_holds: ub <= d - c * sigma,
            })
        })
        .collect()
}

/// Rotation by 180° about the line of `t̄` in the cross model. On the cut
/// locus `x̄` lies on that line, so the rotation fixes `x̄`.
pub fn half_turn(base: &CornerCurveParams) -> Matrix3<f64> {
    let axis = base.base().t.to_dual();
    rotation_about(&axis, std::f64::consts::PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemiconvexitySample {
    pub sigma: f64,
    /// `[d(p) + d(Mp) - 2d((p + Mp)/2)] / |p - Mp|²`.
    pub quotient: f64,
    /// Euclidean distance from the midpoint to the base point.
    pub midpoint_offset: f64,
    /// `|d(p) - d(Mp)|` with both distances from shooting, when requested.
    pub symmetry_gap: Option<f64>,
    /// `[d(p) + d(2p̄ - p) - 2d(p̄)] / |2p - 2p̄|²`, when requested.
    pub centered_quotient: Option<f64>,
}

/// Second-difference quotients of the distance across the cut locus.
///
/// `p = corner_curve(σ)` and `Mp` are reached by extremals before their cut
/// time, so both distances are exact lengths; the midpoint lies on the cut
/// locus and is evaluated by the closed form. With a shooting configuration
/// the probe also measures `d(p)` and `d(Mp)` independently and evaluates the
/// centered variant, whose midpoint is the base point and which needs a
/// shooting distance for `2p̄ - p`.
pub fn semiconvexity_probe(
    base: &CornerCurveParams,
    sigmas: &[f64],
    shooting: Option<&ShootingConfig>,
) -> Result<Vec<SemiconvexitySample>> {
    let m = half_turn(base);
    let pbar = base.base();
    let d_bar = base.base_distance();
    sigmas
        .iter()
        .map(|&sigma| {
            if !(sigma > 0.0) {
                return Err(Error::Domain {
                    what: "sigma",
                    constraint: "> 0",
                    value: sigma,
                });
            }
            if !base.bound_is_exact(sigma) {
                return Err(Error::SigmaOutOfRange {
                    sigma,
                    max: base.sigma_max(),
                });
            }
            let p = corner_curve(base, sigma)?;
            let mp = rotate(&m, &p)?;
            let d_p = base.upper_bound(sigma);
            // the rotated extremal has the same length
            let t = base.triple_at(sigma);
            let d_mp = (t.a().norm_squared() + t.z().norm_squared()).sqrt();
            let mid = GroupPoint::new((p.x + mp.x) * 0.5, (p.t + mp.t) * 0.5);
            let d_mid = crate::cutlocus::cut_distance(&CutPoint::new(mid)?);
            let gap2 = p.euclidean_distance(&mp).powi(2);
            let (symmetry_gap, centered_quotient) = match shooting {
                Some(cfg) => {
                    let gap = (distance(&p, cfg)?.distance - distance(&mp, cfg)?.distance).abs();
                    let opposite = GroupPoint::new(pbar.x * 2.0 - p.x, pbar.t * 2.0 - p.t);
                    let d_opp = distance(&opposite, cfg)?.distance;
                    let span2 = (2.0 * p.euclidean_distance(&pbar)).powi(2);
                    (Some(gap), Some((d_p + d_opp - 2.0 * d_bar) / span2))
                }
                None => (None, None),
            };
            Ok(SemiconvexitySample {
                sigma,
                quotient: (d_p + d_mp - 2.0 * d_mid) / gap2,
                midpoint_offset: mid.euclidean_distance(&pbar),
                symmetry_gap,
                centered_quotient,
            })
        })
        .collect()
}
