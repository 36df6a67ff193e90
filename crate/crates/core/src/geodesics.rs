//! Normal extremals from the origin.
//!
//! An extremal is driven by the control `u(s) = a cos(2φs) + b sin(2φs) + z`
//! where `(a, b, z)` is an admissible triple and `φ ≥ 0`. Integrating
//! `ẋ = u, ṫ = ½ x∧u` from the origin gives a closed form; every coefficient
//! is a function of `w = 2φs` with a removable singularity at `w = 0`, which
//! is summed by series below [`SMALL_PHASE`].

use crate::algebra::{wedge, GroupPoint, Vec3};
use crate::error::{Error, Result};
use crate::scalars::Suvw;

/// Relative tolerance of the admissibility checks.
pub const ADMISSIBLE_TOL: f64 = 1e-10;

/// Below this value of `|2φs|` the curve coefficients are summed by series.
pub const SMALL_PHASE: f64 = 0.5;

const SERIES_TERMS: usize = 14;

/// Pairwise orthogonal `a, b, z` with `|a| = |b|`.
///
/// `a = b = 0` is accepted and represents a straight line with constant
/// control `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleTriple {
    a: Vec3,
    b: Vec3,
    z: Vec3,
}

impl AdmissibleTriple {
    pub fn new(a: Vec3, b: Vec3, z: Vec3) -> Result<Self> {
        let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
        if !(finite(&a) && finite(&b) && finite(&z)) {
            return Err(Error::Inadmissible("non-finite component".into()));
        }
        let scale = a.norm().max(b.norm()).max(z.norm());
        let (na, nb) = (a.norm(), b.norm());
        if (na - nb).abs() > ADMISSIBLE_TOL * scale {
            return Err(Error::Inadmissible(format!("|a| = {na} differs from |b| = {nb}")));
        }
        let tol = ADMISSIBLE_TOL * scale * scale;
        for (name, ip) in [("<a,b>", a.dot(&b)), ("<a,z>", a.dot(&z)), ("<b,z>", b.dot(&z))] {
            if ip.abs() > tol {
                return Err(Error::Inadmissible(format!("{name} = {ip:e} is not zero")));
            }
        }
        Ok(Self { a, b, z })
    }

    /// Straight line with constant control `z`.
    pub fn straight(z: Vec3) -> Self {
        Self {
            a: Vec3::zeros(),
            b: Vec3::zeros(),
            z,
        }
    }

    pub(crate) fn new_unchecked(a: Vec3, b: Vec3, z: Vec3) -> Self {
        Self { a, b, z }
    }

    pub fn a(&self) -> &Vec3 {
        &self.a
    }

    pub fn b(&self) -> &Vec3 {
        &self.b
    }

    pub fn z(&self) -> &Vec3 {
        &self.z
    }

    /// True when `a = b = 0`.
    pub fn is_straight(&self) -> bool {
        self.a.norm() == 0.0
    }

    /// `√(|a|² + |z|²)`, the constant speed of the curve.
    pub fn speed(&self) -> f64 {
        (self.a.norm_squared() + self.z.norm_squared()).sqrt()
    }

    pub fn scaled(&self, r: f64) -> Self {
        Self::new_unchecked(self.a * r, self.b * r, self.z * r)
    }
}

/// An admissible triple together with the frequency `φ = λ/2 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalParams {
    pub triple: AdmissibleTriple,
    pub phi: f64,
}

impl ExtremalParams {
    pub fn new(triple: AdmissibleTriple, phi: f64) -> Result<Self> {
        if !(phi >= 0.0) || !phi.is_finite() {
            return Err(Error::Domain {
                what: "phi",
                constraint: "finite and >= 0",
                value: phi,
            });
        }
        Ok(Self { triple, phi })
    }

    pub fn from_vectors(a: Vec3, b: Vec3, z: Vec3, phi: f64) -> Result<Self> {
        Self::new(AdmissibleTriple::new(a, b, z)?, phi)
    }

    pub fn lambda(&self) -> f64 {
        2.0 * self.phi
    }
}

/// `u(s) = a cos(2φs) + b sin(2φs) + z`.
pub fn control(params: &ExtremalParams, s: f64) -> Vec3 {
    let tr = &params.triple;
    let (sn, cs) = (params.lambda() * s).sin_cos();
    tr.a * cs + tr.b * sn + tr.z
}

/// Curve coefficients as functions of `w = λs`:
/// `sin w / w`, `(1 - cos w)/w`, and the three `t` coefficients divided by `s²`.
struct Coefficients {
    sinc: f64,
    versinc: f64,
    ab: f64,
    az: f64,
    bz: f64,
}

fn coefficients(w: f64) -> Coefficients {
    if w.abs() < SMALL_PHASE {
        coefficient_series(w)
    } else {
        let (sn, cs) = w.sin_cos();
        let w2 = w * w;
        Coefficients {
            sinc: sn / w,
            versinc: (1.0 - cs) / w,
            ab: (w - sn) / (2.0 * w2),
            az: (2.0 * (1.0 - cs) - w * sn) / (2.0 * w2),
            bz: (w * (1.0 + cs) - 2.0 * sn) / (2.0 * w2),
        }
    }
}

fn coefficient_series(w: f64) -> Coefficients {
    // sinc   = Σ_{k≥0} (-1)^k w^{2k} / (2k+1)!
    // versinc= Σ_{k≥1} (-1)^{k+1} w^{2k-1} / (2k)!
    // ab     = Σ_{k≥1} (-1)^{k+1} w^{2k-1} / (2 (2k+1)!)
    // az     = Σ_{k≥2} (-1)^{k+1} (1-k) w^{2k-2} / (2k)!
    // bz     = Σ_{k≥1} (-1)^k (2k-1) w^{2k-1} / (2 (2k+1)!)
    let w2 = w * w;
    let mut c = Coefficients {
        sinc: 1.0,
        versinc: 0.0,
        ab: 0.0,
        az: 0.0,
        bz: 0.0,
    };
    let mut inv_fact_odd = 1.0; // 1/(2k+1)!
    let mut inv_fact_even = 1.0; // 1/(2k)!
    let mut pow_lo = 1.0; // w^{2k-2}
    let mut pow_odd = w; // w^{2k-1}
    let mut pow_hi = w2; // w^{2k}
    for k in 1..=SERIES_TERMS {
        let kf = k as f64;
        inv_fact_even /= (2.0 * kf - 1.0) * (2.0 * kf);
        inv_fact_odd /= (2.0 * kf) * (2.0 * kf + 1.0);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 }; // (-1)^k
        c.sinc += sign * pow_hi * inv_fact_odd;
        c.versinc -= sign * pow_odd * inv_fact_even;
        c.ab -= sign * pow_odd * inv_fact_odd * 0.5;
        if k >= 2 {
            c.az -= sign * (1.0 - kf) * pow_lo * inv_fact_even;
        }
        c.bz += sign * (2.0 * kf - 1.0) * pow_odd * inv_fact_odd * 0.5;
        pow_lo *= w2;
        pow_odd *= w2;
        pow_hi *= w2;
    }
    c
}

/// Closed form of the extremal at time `s`.
pub fn extremal_point(params: &ExtremalParams, s: f64) -> GroupPoint {
    let tr = &params.triple;
    let c = coefficients(params.lambda() * s);
    let x = (tr.a * c.sinc + tr.b * c.versinc) * s + tr.z * s;
    let s2 = s * s;
    let t = wedge(&tr.a, &tr.b) * (c.ab * s2)
        + wedge(&tr.a, &tr.z) * (c.az * s2)
        + wedge(&tr.b, &tr.z) * (c.bz * s2);
    GroupPoint::new(x, t)
}

/// `F(a,b,z,φ)`, the endpoint at `s = 1` of the extremal with `λ = 2φ`.
pub fn endpoint_f(triple: &AdmissibleTriple, phi: f64) -> GroupPoint {
    let f = Suvw::eval(phi.abs());
    let (sn, cs) = phi.sin_cos();
    let (a, b, z) = (triple.a(), triple.b(), triple.z());
    let x = (a * cs + b * sn) * f.s + z;
    let t = wedge(a, b) * f.u + wedge(&(a * sn - b * cs), z) * f.v;
    GroupPoint::new(x, t)
}

/// `G(α', β', ζ, φ) = (S β' + ζ, α'∧(U β' + V ζ))`.
pub fn endpoint_g(triple: &AdmissibleTriple, phi: f64) -> GroupPoint {
    let f = Suvw::eval(phi.abs());
    let (ap, bp, zeta) = (triple.a(), triple.b(), triple.z());
    GroupPoint::new(bp * f.s + zeta, wedge(ap, &(bp * f.u + zeta * f.v)))
}

/// `(a', b') = (a sin φ - b cos φ, a cos φ + b sin φ)`.
pub fn change_vars(a: &Vec3, b: &Vec3, phi: f64) -> (Vec3, Vec3) {
    let (sn, cs) = phi.sin_cos();
    (a * sn - b * cs, a * cs + b * sn)
}

/// Inverse of [`change_vars`]: `a = a' sin φ + b' cos φ`, `b = b' sin φ - a' cos φ`.
pub fn change_vars_inverse(ap: &Vec3, bp: &Vec3, phi: f64) -> (Vec3, Vec3) {
    let (sn, cs) = phi.sin_cos();
    (ap * sn + bp * cs, bp * sn - ap * cs)
}

/// Applies [`change_vars`] to a whole triple; `z` is unchanged.
pub fn change_triple(triple: &AdmissibleTriple, phi: f64) -> AdmissibleTriple {
    let (ap, bp) = change_vars(triple.a(), triple.b(), phi);
    AdmissibleTriple::new_unchecked(ap, bp, *triple.z())
}

pub fn change_triple_inverse(triple: &AdmissibleTriple, phi: f64) -> AdmissibleTriple {
    let (a, b) = change_vars_inverse(triple.a(), triple.b(), phi);
    AdmissibleTriple::new_unchecked(a, b, *triple.z())
}

/// Length of the extremal on `[0, s]`.
pub fn length(params: &ExtremalParams, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain {
            what: "s",
            constraint: ">= 0",
            value: s,
        });
    }
    Ok(s * params.triple.speed())
}
