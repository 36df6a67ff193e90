//! Global distance by multistart covector shooting.
//!
//! The target is first normalized by a dilation so that `|x| + |t|^{1/2} = 1`.
//! Each start `(ξ, τ)` is refined by Levenberg-Marquardt on the six equations
//! `exp_map((ξ, τ), 1) = target`; the distance is the smallest `|ξ|` among the
//! converged solutions that are still minimizing at time 1.

use std::sync::OnceLock;

use nalgebra::{Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use serde::Serialize;

use crate::algebra::{dilate, to_cross, GroupPoint, Vec3};
use crate::error::{Error, Result};
use crate::hamiltonian::{cut_time, exp_map, Covector};
use crate::sampling::random_unit;
use crate::scalars::phi1;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CARNOT_CUT_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Accepted endpoint mismatch on the normalized target.
    pub tol: f64,
    pub max_iter: usize,
    /// Candidates with `T_cut < 1 - cut_slack` are discarded.
    pub cut_slack: f64,
    /// Worker threads; `None` defers to `CARNOT_CUT_THREADS` or the rayon default.
    pub threads: Option<usize>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 0,
            tol: 1e-10,
            max_iter: 1000,
            cut_slack: 1e-9,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingResult {
    pub distance: f64,
    /// Initial covector of the minimizer for the original target, with `s = 1`.
    pub minimizer: Covector,
    /// Endpoint mismatch on the normalized target.
    pub residual: f64,
    pub restarts_used: usize,
    /// Starts that converged and passed the cut-time and lower-bound filters.
    pub accepted: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    params: Vector6<f64>,
    residual: f64,
}

fn covector(v: &Vector6<f64>) -> Covector {
    Covector::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
}

fn residual(v: &Vector6<f64>, target: &Vector6<f64>) -> Vector6<f64> {
    Vector6::from(exp_map(&covector(v), 1.0).coords()) - target
}

fn jacobian(v: &Vector6<f64>, target: &Vector6<f64>) -> Matrix6<f64> {
    let mut jac = Matrix6::zeros();
    for j in 0..6 {
        let h = 1e-7 * (1.0 + v[j].abs());
        let mut fwd = *v;
        fwd[j] += h;
        let mut bwd = *v;
        bwd[j] -= h;
        jac.set_column(j, &((residual(&fwd, target) - residual(&bwd, target)) / (2.0 * h)));
    }
    jac
}

/// Levenberg-Marquardt with Marquardt diagonal scaling. Iterates past `tol`
/// until the residual stalls so that accepted solutions are fully polished.
fn levenberg_marquardt(start: Vector6<f64>, target: &Vector6<f64>, cfg: &ShootingConfig) -> Candidate {
    let mut x = start;
    let mut f = residual(&x, target);
    let mut cost = f.norm_squared();
    let mut damping = 1e-3;
    let mut stalled = 0;
    for _ in 0..cfg.max_iter {
        if cost.sqrt() <= 1e-3 * cfg.tol {
            break;
        }
        let jac = jacobian(&x, target);
        let jtj = jac.transpose() * jac;
        let grad = jac.transpose() * f;
        let mut improved = false;
        while damping < 1e12 {
            let mut lhs = jtj;
            for i in 0..6 {
                lhs[(i, i)] += damping * jtj[(i, i)].max(1e-9);
            }
            let Some(chol) = lhs.cholesky() else {
                damping *= 4.0;
                continue;
            };
            let trial = x - chol.solve(&grad);
            let f_trial = residual(&trial, target);
            let c_trial = f_trial.norm_squared();
            if c_trial.is_finite() && c_trial < cost {
                let gain = (cost - c_trial) / cost;
                x = trial;
                f = f_trial;
                cost = c_trial;
                damping = (damping / 3.0).max(1e-12);
                improved = true;
                stalled = if gain < 1e-6 && cost.sqrt() <= cfg.tol { stalled + 1 } else { 0 };
                break;
            }
            damping *= 4.0;
        }
        if !improved || stalled >= 3 {
            break;
        }
    }
    Candidate {
        params: x,
        residual: cost.sqrt(),
    }
}

fn starts(cfg: &ShootingConfig) -> Vec<Vector6<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tau_max = 2.0 * phi1();
    (0..cfg.restarts)
        .map(|_| {
            let xi = random_unit(&mut rng) * rng.gen_range(0.5..=4.0);
            let radius = tau_max * rng.gen::<f64>().cbrt();
            let tau = random_unit(&mut rng) * radius;
            Vector6::new(xi.x, xi.y, xi.z, tau.x, tau.y, tau.z)
        })
        .collect()
}

fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

fn shared_pool() -> Option<&'static ThreadPool> {
    static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = env_threads()?;
        ThreadPoolBuilder::new().num_threads(n).build().ok()
    })
    .as_ref()
}

fn run_starts(starts: &[Vector6<f64>], target: &Vector6<f64>, cfg: &ShootingConfig) -> Vec<Candidate> {
    let work = || -> Vec<Candidate> {
        starts
            .par_iter()
            .map(|s| levenberg_marquardt(*s, target, cfg))
            .collect()
    };
    match cfg.threads {
        Some(n) => match ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => match shared_pool() {
            Some(pool) => pool.install(work),
            None => work(),
        },
    }
}

/// `max(|x|, √(2π|t|))`: the projection of a horizontal curve is at least as
/// long as the chord, and by the isoperimetric inequality for arcs a curve
/// enclosing area `|t|` with its chord has length at least `√(2π|t|)`.
pub fn length_lower_bound(p: &GroupPoint) -> f64 {
    p.x.norm().max((2.0 * std::f64::consts::PI * p.t.norm()).sqrt())
}

/// Distance from the origin to `target` by multistart shooting.
pub fn distance(target: &GroupPoint, cfg: &ShootingConfig) -> Result<ShootingResult> {
    if !target.is_finite() {
        return Err(Error::Invalid("target has non-finite coordinates".into()));
    }
    if cfg.restarts == 0 {
        return Err(Error::Invalid("at least one restart is required".into()));
    }
    let scale = target.x.norm() + target.t.norm().sqrt();
    if scale == 0.0 {
        return Err(Error::OriginTarget);
    }
    let unit = dilate(1.0 / scale, target)?;
    let goal = Vector6::from(to_cross(&unit).coords());
    let floor = length_lower_bound(&unit) * (1.0 - 1e-9);

    let candidates = run_starts(&starts(cfg), &goal, cfg);
    let restarts_used = cfg.restarts;

    let best_residual = candidates.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
    let mut accepted = 0;
    let mut best: Option<(f64, Candidate)> = None;
    for c in &candidates {
        if !(c.residual <= cfg.tol) {
            continue;
        }
        let cov = covector(&c.params);
        let len = cov.xi.norm();
        let Ok(tc) = cut_time(&cov) else { continue };
        if tc.value() < 1.0 - cfg.cut_slack || len < floor {
            continue;
        }
        accepted += 1;
        if best.is_none_or(|(l, _)| len < l) {
            best = Some((len, *c));
        }
    }
    let Some((len, c)) = best else {
        return Err(Error::NoConvergence {
            best_residual,
            restarts: restarts_used,
        });
    };
    let cov = covector(&c.params);
    Ok(ShootingResult {
        distance: len * scale,
        minimizer: Covector::new(cov.xi * scale, cov.tau),
        residual: c.residual,
        restarts_used,
        accepted,
    })
}
