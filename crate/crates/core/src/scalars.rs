//! The scalar function family behind every closed form in the crate.
//!
//! ```text
//! S(θ) = sin θ / θ
//! U(θ) = (θ - sin θ cos θ) / (4θ²)
//! V(θ) = (sin θ - θ cos θ) / (2θ²)
//! W(θ) = U - S V
//! P(θ) = -(S / V) √(W / U)
//! Q(θ) = -U S / V
//! R(θ) = (1 - S²) / √(U W)
//! ```
//!
//! `φ_k` is the k-th positive root of `tan θ = θ` (the zeros of `V`). On
//! `[π, φ₁)` both `P` and `Q` increase from 0 to +∞, which is what makes
//! `p_inv` and `q_inv` well defined.
//!
//! Below [`SERIES_THRESHOLD`] the functions are summed from their Taylor
//! series; the direct formula for `W` cancels catastrophically near zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Below this phase `S, U, V, W` are evaluated by series.
pub const SERIES_THRESHOLD: f64 = 0.5;

/// Tolerance used to declare `θ` a pole of `P` (or of `Q`).
pub const POLE_TOL: f64 = 1e-12;

/// Gap kept between an inverse's result and `φ₁`.
pub const POLE_CAP: f64 = 1e-12;

const SERIES_TERMS: usize = 14;
const BISECTION_WIDTH: f64 = 1e-8;
const MAX_ROOT_ITER: usize = 100;
const CACHED_ROOTS: usize = 64;

/// `S, U, V, W` evaluated at one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Suvw {
    pub theta: f64,
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Suvw {
    pub fn at(theta: f64) -> Result<Suvw> {
        check_nonnegative(theta)?;
        Ok(Self::eval(theta))
    }

    /// Unchecked evaluation; callers guarantee `theta >= 0`.
    pub(crate) fn eval(theta: f64) -> Suvw {
        if theta < SERIES_THRESHOLD {
            series(theta)
        } else {
            direct(theta)
        }
    }

    /// `(S', U', V')`; only meaningful for `theta > 0`.
    pub(crate) fn derivatives(&self) -> (f64, f64, f64) {
        let th = self.theta;
        let ds = -2.0 * self.v;
        let du = th.cos() / th * self.v;
        let dv = 0.5 * self.s - 2.0 * self.v / th;
        (ds, du, dv)
    }

    pub(crate) fn dw(&self) -> f64 {
        let (ds, du, dv) = self.derivatives();
        du - ds * self.v - self.s * dv
    }
}

fn check_nonnegative(theta: f64) -> Result<()> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            what: "theta",
            constraint: "finite and >= 0",
            value: theta,
        });
    }
    Ok(())
}

fn check_positive(theta: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            what: "theta",
            constraint: "finite and > 0",
            value: theta,
        });
    }
    Ok(())
}

fn direct(theta: f64) -> Suvw {
    let (sn, cs) = theta.sin_cos();
    let t2 = theta * theta;
    let s = sn / theta;
    let u = (theta - sn * cs) / (4.0 * t2);
    let v = (sn - theta * cs) / (2.0 * t2);
    let w = (t2 + theta * sn * cs - 2.0 * sn * sn) / (4.0 * t2 * theta);
    Suvw { theta, s, u, v, w }
}

fn series(theta: f64) -> Suvw {
    let t2 = theta * theta;
    // S = Σ (-1)^k θ^{2k} / (2k+1)!
    // U = Σ_{k≥1} (-1)^{k+1} 4^{k-1} θ^{2k-1} / (2k+1)!
    // V = Σ_{k≥1} (-1)^{k+1} k θ^{2k-1} / (2k+1)!
    // W = Σ_{m≥3} (-1)^{m+1} 2^{2m-3} (m-2) θ^{2m-3} / (2m)!
    let mut s = 0.0;
    let mut u = 0.0;
    let mut v = 0.0;
    let mut w = 0.0;

    // inv_fact_odd = 1/(2k+1)!, pow = θ^{2k}
    let mut inv_fact_odd = 1.0;
    let mut pow = 1.0;
    let mut four_pow = 0.25; // 4^{k-1}
    for k in 0..SERIES_TERMS {
        let kf = k as f64;
        if k > 0 {
            pow *= t2;
            inv_fact_odd /= (2.0 * kf) * (2.0 * kf + 1.0);
            four_pow *= 4.0;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * pow * inv_fact_odd;
        if k >= 1 {
            // θ^{2k-1} = pow / θ, sign (-1)^{k+1} = -sign
            let odd_pow_coeff = -sign * inv_fact_odd * pow;
            u += odd_pow_coeff * four_pow;
            v += odd_pow_coeff * kf;
        }
    }
    u /= theta.max(f64::MIN_POSITIVE);
    v /= theta.max(f64::MIN_POSITIVE);
    if theta == 0.0 {
        u = 0.0;
        v = 0.0;
    }

    // W in powers θ^{2m-3} = θ³ · θ^{2(m-3)}
    let mut inv_fact_even = 1.0 / 720.0; // 1/(2m)! at m = 3
    let mut pow = theta * t2;
    let mut two_pow = 8.0; // 2^{2m-3} at m = 3
    for m in 3..(3 + SERIES_TERMS) {
        let mf = m as f64;
        if m > 3 {
            pow *= t2;
            inv_fact_even /= (2.0 * mf - 1.0) * (2.0 * mf);
            two_pow *= 4.0;
        }
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        w += sign * two_pow * (mf - 2.0) * inv_fact_even * pow;
    }
    Suvw { theta, s, u, v, w }
}

pub fn s(theta: f64) -> Result<f64> {
    Ok(Suvw::at(theta)?.s)
}

pub fn u(theta: f64) -> Result<f64> {
    Ok(Suvw::at(theta)?.u)
}

pub fn v(theta: f64) -> Result<f64> {
    Ok(Suvw::at(theta)?.v)
}

pub fn w(theta: f64) -> Result<f64> {
    Ok(Suvw::at(theta)?.w)
}

/// `S' = -2V`.
pub fn ds(theta: f64) -> Result<f64> {
    check_positive(theta)?;
    Ok(Suvw::eval(theta).derivatives().0)
}

/// `U' = (cos θ / θ) V`.
pub fn du(theta: f64) -> Result<f64> {
    check_positive(theta)?;
    Ok(Suvw::eval(theta).derivatives().1)
}

/// `V' = S/2 - 2V/θ`.
pub fn dv(theta: f64) -> Result<f64> {
    check_positive(theta)?;
    Ok(Suvw::eval(theta).derivatives().2)
}

/// `sin θ - θ cos θ`, which shares its positive zeros with `V` and has no
/// removable singularity.
fn tan_gap(theta: f64) -> (f64, f64) {
    let (sn, cs) = theta.sin_cos();
    (sn - theta * cs, theta * sn)
}

fn compute_phi(k: usize) -> f64 {
    let kf = k as f64;
    let (mut lo, mut hi) = (kf * PI, (kf + 0.5) * PI);
    let f_lo = tan_gap(lo).0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f_mid = tan_gap(mid).0;
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    newton_polish(tan_gap, lo, hi)
}

/// Newton iteration started at the bracket midpoint and kept inside the
/// bracket `[lo, hi]`; falls back to bisection when a step leaves it.
fn newton_polish(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    let f_lo_positive = f(lo).0 > 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ROOT_ITER {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == f_lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

fn phi_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=CACHED_ROOTS).map(compute_phi).collect())
}

/// The k-th positive solution of `tan θ = θ`, in `]kπ, (k+½)π[`.
pub fn phi_k(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain {
            what: "k",
            constraint: ">= 1",
            value: 0.0,
        });
    }
    Ok(phi_table()
        .get(k - 1)
        .copied()
        .unwrap_or_else(|| compute_phi(k)))
}

/// `φ₁ ≈ 4.4934`, the supremum of normalized cut times.
pub fn phi1() -> f64 {
    phi_table()[0]
}

fn nearest_pole(theta: f64) -> Option<f64> {
    let k = (theta / PI).floor() as usize;
    if k == 0 {
        return None;
    }
    phi_k(k).ok()
}

/// `P(θ) = -(S/V)√(W/U)`.
pub fn p(theta: f64) -> Result<f64> {
    check_positive(theta)?;
    if let Some(pole) = nearest_pole(theta) {
        if (theta - pole).abs() < POLE_TOL {
            return Err(Error::PoleOfP(theta));
        }
    }
    let f = Suvw::eval(theta);
    Ok(-(f.s / f.v) * (f.w / f.u).sqrt())
}

/// `Q(θ) = -U S / V` on `]0, φ₁[`.
pub fn q(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < phi1()) {
        return Err(Error::Domain {
            what: "theta",
            constraint: "in ]0, phi_1[",
            value: theta,
        });
    }
    let f = Suvw::eval(theta);
    Ok(-f.u * f.s / f.v)
}

/// `R(θ) = (1 - S²)/√(U W)`.
pub fn r(theta: f64) -> Result<f64> {
    check_positive(theta)?;
    let f = Suvw::eval(theta);
    Ok((1.0 - f.s * f.s) / (f.u * f.w).sqrt())
}

/// Result of inverting `P` or `Q` on `[π, φ₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseRoot {
    pub theta: f64,
    /// Set when the input exceeded the value at `φ₁ - POLE_CAP` and the
    /// result was capped.
    pub near_pole: bool,
}

fn check_inverse_arg(v: f64) -> Result<()> {
    if !(v >= 0.0) || v.is_nan() {
        return Err(Error::Domain {
            what: "v",
            constraint: ">= 0",
            value: v,
        });
    }
    Ok(())
}

/// `S √(W/U)` and its derivative.
fn p_numerator(theta: f64) -> (f64, f64) {
    let f = Suvw::eval(theta);
    let (ds, du, _) = f.derivatives();
    let ratio = (f.w / f.u).sqrt();
    let d_ratio = (f.dw() * f.u - f.w * du) / (2.0 * f.u * f.u * ratio);
    (f.s * ratio, ds * ratio + f.s * d_ratio)
}

/// `U S` and its derivative.
fn q_numerator(theta: f64) -> (f64, f64) {
    let f = Suvw::eval(theta);
    let (ds, du, _) = f.derivatives();
    (f.u * f.s, du * f.s + f.u * ds)
}

/// Solves `value · V + numerator = 0`, equivalent to `numerator / (-V) = value`
/// but free of the pole of the quotient.
fn invert_on_bracket(
    value: f64,
    numerator: impl Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
) -> f64 {
    let g = |th: f64| {
        let f = Suvw::eval(th);
        let dv = f.derivatives().2;
        let (n, dn) = numerator(th);
        (value * f.v + n, value * dv + dn)
    };
    let (mut lo, mut hi) = (lo, hi);
    let lo_positive = g(lo).0 > 0.0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if (g(mid).0 > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    newton_polish(g, lo, hi)
}

fn invert_capped(
    v: f64,
    func: fn(f64) -> Result<f64>,
    numerator: fn(f64) -> (f64, f64),
) -> Result<InverseRoot> {
    check_inverse_arg(v)?;
    if v == 0.0 {
        return Ok(InverseRoot {
            theta: PI,
            near_pole: false,
        });
    }
    let cap = phi1() - POLE_CAP;
    if v >= func(cap)? {
        return Ok(InverseRoot {
            theta: cap,
            near_pole: true,
        });
    }
    Ok(InverseRoot {
        theta: invert_on_bracket(v, numerator, PI, phi1()),
        near_pole: false,
    })
}

/// Inverse of `P` restricted to `[π, φ₁)`.
pub fn p_inv(v: f64) -> Result<InverseRoot> {
    invert_capped(v, p, p_numerator)
}

/// Inverse of `Q` restricted to `[π, φ₁)`.
pub fn q_inv(v: f64) -> Result<InverseRoot> {
    invert_capped(v, q, q_numerator)
}

/// Roots of `P(θ) = v` in each bracket `]kπ, φ_k[`, `k = 1..=kmax`.
///
/// Monotonicity is only known on the first bracket, so each bracket is
/// scanned for sign changes and the first one is refined. For `v = 0` the
/// roots are `kπ`.
pub fn solve_p_all(v: f64, kmax: usize) -> Result<Vec<f64>> {
    check_inverse_arg(v)?;
    let mut roots = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let lo = k as f64 * PI;
        if v == 0.0 {
            roots.push(lo);
            continue;
        }
        let hi = phi_k(k)?;
        let g = |th: f64| v * Suvw::eval(th).v + p_numerator(th).0;
        const SCAN: usize = 32;
        let mut a = lo;
        let mut ga = g(a);
        for i in 1..=SCAN {
            let b = lo + (hi - lo) * i as f64 / SCAN as f64;
            let gb = g(b);
            if ga == 0.0 {
                roots.push(a);
                break;
            }
            if (ga > 0.0) != (gb > 0.0) {
                roots.push(invert_on_bracket(v, p_numerator, a, b));
                break;
            }
            a = b;
            ga = gb;
        }
    }
    Ok(roots)
}
