//! Self-check suites run by `carnot-cut verify`.
//!
//! Every check compares two independent routes (closed form against shooting,
//! closed form against numerical integration, bisection against the cached
//! roots) or tests a monotonicity/positivity statement on a dense grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{dilate, Bivec3, GroupPoint, Vec3};
use crate::cutlocus::{
    cut_distance, extremal_family, is_cut, minimizers_all_theta, t_cut, CutPoint, GENERATED_CUT_TOL,
};
use crate::error::{Error, Result};
use crate::geodesics::{change_vars, extremal_point, length, AdmissibleTriple, ExtremalParams};
use crate::hamiltonian::{exp_map, exp_map_ode, Covector};
use crate::sampling::{random_cut_point, random_params, random_unit};
use crate::scalars::{p, phi1, phi_k, q, r, w};
use crate::solver::{corner_coeffs, corner_curve, distance, semiconvexity_probe, CornerCurveParams, ShootingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Scalars,
    Heisenberg,
    Cutlocus,
    Oracle,
    Corner,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["scalars", "heisenberg", "cutlocus", "oracle", "corner", "all"];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Scalars, Suite::Heisenberg, Suite::Cutlocus, Suite::Oracle, Suite::Corner],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Self::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [Suite::Scalars, Suite::Heisenberg, Suite::Cutlocus, Suite::Oracle, Suite::Corner, Suite::All];
        all.into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite `{s}` (expected one of {})", Self::NAMES.join(", "))))
    }
}

/// Outcome of one check. `observed` is compared against `tolerance`; for
/// counting checks it is the number of violations and the tolerance is 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub seconds: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    pub shooting: ShootingConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol_scale: 1.0,
            shooting: ShootingConfig::default(),
        }
    }
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    suite: Suite,
    rng: ChaCha8Rng,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    /// Records `observed ≤ tolerance · tol_scale`.
    fn within(&mut self, name: &'static str, observed: f64, tolerance: f64, cases: usize, start: Instant, note: String) {
        let tolerance = tolerance * self.cfg.tol_scale;
        self.checks.push(Check {
            suite: self.suite,
            name,
            passed: observed <= tolerance,
            observed,
            tolerance,
            cases,
            seconds: start.elapsed().as_secs_f64(),
            note,
        });
    }

    /// Records a runtime budget: `observed` is 1 when `seconds` exceeds
    /// `limit`, so the record stays deterministic while the time itself goes
    /// to the `seconds` field.
    fn budget(&mut self, name: &'static str, seconds: f64, limit: f64, cases: usize) {
        let over = seconds > limit;
        self.checks.push(Check {
            suite: self.suite,
            name,
            passed: !over,
            observed: f64::from(u8::from(over)),
            tolerance: 0.0,
            cases,
            seconds,
            note: format!("budget {limit} s"),
        });
    }

    fn count(&mut self, name: &'static str, violations: usize, cases: usize, start: Instant, note: String) {
        self.checks.push(Check {
            suite: self.suite,
            name,
            passed: violations == 0,
            observed: violations as f64,
            tolerance: 0.0,
            cases,
            seconds: start.elapsed().as_secs_f64(),
            note,
        });
    }
}

/// Runs `suite` (every suite for [`Suite::All`]) with the given seed.
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Report> {
    if !(cfg.tol_scale > 0.0) {
        return Err(Error::Domain {
            what: "tol_scale",
            constraint: "> 0",
            value: cfg.tol_scale,
        });
    }
    let mut checks = Vec::new();
    for part in suite.parts() {
        let mut ctx = Ctx {
            cfg,
            suite: part,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            checks: Vec::new(),
        };
        match part {
            Suite::Scalars => scalars(&mut ctx),
            Suite::Heisenberg => heisenberg(&mut ctx)?,
            Suite::Cutlocus => cutlocus(&mut ctx)?,
            Suite::Oracle => oracle(&mut ctx)?,
            Suite::Corner => corner(&mut ctx)?,
            Suite::All => unreachable!("expanded by parts"),
        }
        checks.extend(ctx.checks);
    }
    Ok(Report {
        suite,
        seed: cfg.seed,
        checks,
    })
}

/// Root of `sin θ - θ cos θ` in `]π, 3π/2[` by plain bisection.
fn phi1_by_bisection() -> f64 {
    let f = |x: f64| x.sin() - x * x.cos();
    let (mut lo, mut hi) = (PI, 1.5 * PI);
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f(lo) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn increasing_violations(values: impl Iterator<Item = f64>) -> usize {
    let mut prev = f64::NEG_INFINITY;
    let mut bad = 0;
    for v in values {
        if !(v > prev) {
            bad += 1;
        }
        prev = v;
    }
    bad
}

const GRID: usize = 10_000;

fn scalars(ctx: &mut Ctx) {
    let t0 = Instant::now();
    let err = (phi1_by_bisection() - phi1()).abs();
    ctx.within("phi1_matches_bisection", err, 1e-12, 1, t0, String::new());

    let t0 = Instant::now();
    let bad = grid(1e-3, 4.0 * PI, GRID).filter(|&th| !(w(th).unwrap_or(f64::NAN) > 0.0)).count();
    ctx.count("w_positive", bad, GRID, t0, "theta in [1e-3, 4 pi]".into());

    let hi = phi1() - 1e-6;
    let t0 = Instant::now();
    let bad = increasing_violations(grid(PI, hi, GRID).map(|th| q(th).unwrap_or(f64::NAN)));
    ctx.count("q_increasing", bad, GRID, t0, "theta in [pi, phi1 - 1e-6]".into());

    let t0 = Instant::now();
    let bad = increasing_violations(grid(PI + 1e-9, hi, GRID).map(|th| p(th).unwrap_or(f64::NAN)));
    ctx.count("p_increasing", bad, GRID, t0, "theta in ]pi, phi1 - 1e-6]".into());

    let t0 = Instant::now();
    let per = GRID / 5;
    let values = (1..=5).flat_map(|k| {
        let lo = k as f64 * PI;
        let hi = phi_k(k).expect("k >= 1") - 1e-9;
        grid(lo + 1e-9, hi, per).map(|th| r(th).unwrap_or(f64::NAN))
    });
    let bad = increasing_violations(values);
    ctx.count("r_increasing_on_brackets", bad, GRID, t0, "union of ]k pi, phi_k[ for k <= 5".into());
}

fn heisenberg(ctx: &mut Ctx) -> Result<()> {
    let cases = 10;
    let mut formula_err: f64 = 0.0;
    let mut shooting_err: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let t0 = Instant::now();
    for _ in 0..cases {
        let t = Bivec3::from_dual(&(random_unit(&mut ctx.rng) * ctx.rng.gen_range(0.01..10.0)));
        let point = GroupPoint::new(Vec3::zeros(), t);
        let exact = (4.0 * PI * t.norm()).sqrt();
        formula_err = formula_err.max((cut_distance(&CutPoint::new(point)?) - exact).abs() / exact);
        let t1 = Instant::now();
        let shot = distance(&point, &ctx.cfg.shooting)?;
        slowest = slowest.max(t1.elapsed().as_secs_f64());
        shooting_err = shooting_err.max((shot.distance - exact).abs() / exact);
    }
    ctx.within("centre_distance_formula", formula_err, 1e-12, cases, t0, "relative error".into());
    ctx.within("centre_distance_shooting", shooting_err, 1e-6, cases, t0, "relative error".into());
    ctx.budget("centre_shooting_seconds", slowest, 1.0, cases);

    let t0 = Instant::now();
    let mut err: f64 = 0.0;
    let mut n = 0;
    for i in 0..10 {
        for j in 0..10 {
            let phi = 0.1 + 0.3 * i as f64;
            let m = crate::sampling::random_rotation(&mut ctx.rng);
            let na = 0.2 + 0.2 * j as f64;
            let params = ExtremalParams::new(AdmissibleTriple::new(m * Vec3::x() * na, m * Vec3::y() * na, Vec3::zeros())?, phi)?;
            err = err.max((t_cut(&params).value() - PI / phi).abs());
            n += 1;
        }
    }
    ctx.within("planar_cut_time", err, 1e-12, n, t0, "t_cut = pi/phi".into());

    let t0 = Instant::now();
    let (c1, _) = corner_coeffs(PI)?;
    ctx.within("corner_c1_at_pi", (c1 - 1.0 / PI).abs(), 1e-12, 1, t0, String::new());
    Ok(())
}

fn cutlocus(ctx: &mut Ctx) -> Result<()> {
    let t0 = Instant::now();
    let n = 500;
    let mut not_cut = 0;
    let mut out_of_range = 0;
    for _ in 0..n {
        let params = random_params(&mut ctx.rng);
        let s = t_cut(&params).value();
        let h = params.phi * s;
        if !(h >= PI && h < phi1()) {
            out_of_range += 1;
        }
        if !is_cut(&extremal_point(&params, s), GENERATED_CUT_TOL) {
            not_cut += 1;
        }
    }
    ctx.count("cut_point_membership", not_cut, n, t0, "tolerance 1e-8".into());
    ctx.budget("cut_point_seconds", t0.elapsed().as_secs_f64(), 5.0, n);
    ctx.count("cut_time_range", out_of_range, n, t0, "phi t_cut in [pi, phi1[".into());

    let t0 = Instant::now();
    let eps = 1e-6;
    let mut err: f64 = 0.0;
    for _ in 0..20 {
        let p = random_params(&mut ctx.rng);
        let tr = &p.triple;
        let small = ExtremalParams::new(AdmissibleTriple::new(tr.a() * eps, tr.b() * eps, *tr.z())?, p.phi)?;
        if tr.z().norm() > 0.0 {
            err = err.max((p.phi * t_cut(&small).value() - phi1()).abs());
        }
    }
    ctx.within("cut_time_limit", err, 1e-4, 20, t0, "epsilon = 1e-6".into());

    let t0 = Instant::now();
    let points = 100;
    let sigmas: Vec<f64> = (0..8).map(|i| i as f64 * PI / 4.0).collect();
    let (mut endpoint, mut len_spread, mut ratio) = (0f64, 0f64, 0f64);
    let mut order_bad = 0;
    for _ in 0..points {
        let cp = random_cut_point(&mut ctx.rng);
        let scale = cp.point().x.norm() + cp.point().t.norm().sqrt();
        let q_theta = q(cp.theta())?;
        let lens: Vec<f64> = sigmas
            .iter()
            .map(|&sigma| -> Result<f64> {
                let fam = extremal_family(&cp, sigma);
                endpoint = endpoint.max(extremal_point(&fam, 1.0).euclidean_distance(cp.point()) / scale);
                let (_, bp) = change_vars(fam.triple.a(), fam.triple.b(), fam.phi);
                let rz = fam.triple.z().norm_squared() / bp.norm_squared();
                ratio = ratio.max((rz - q_theta).abs() / q_theta.max(1.0));
                length(&fam, 1.0)
            })
            .collect::<Result<_>>()?;
        let (lo, hi) = lens.iter().fold((f64::INFINITY, 0f64), |(a, b), &l| (a.min(l), b.max(l)));
        len_spread = len_spread.max((hi - lo) / hi);
        let branches = minimizers_all_theta(&cp, 4)?;
        let branch_lens = branches.iter().map(|b| length(&b.params, 1.0)).collect::<Result<Vec<_>>>()?;
        if branch_lens.iter().skip(1).any(|&l| !(l > branch_lens[0])) {
            order_bad += 1;
        }
    }
    let cases = points * sigmas.len();
    ctx.within("family_endpoint", endpoint, 1e-10, cases, t0, "relative to |x| + |t|^1/2".into());
    ctx.within("family_length_constant", len_spread, 1e-10, cases, t0, "relative spread".into());
    ctx.within("family_zeta_ratio_is_q", ratio, 1e-10, cases, t0, String::new());
    ctx.count("first_branch_is_shortest", order_bad, points, t0, "k <= 4".into());
    Ok(())
}

fn random_covector(rng: &mut ChaCha8Rng, radius: f64) -> Covector {
    loop {
        let v: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-radius..radius));
        let c = Covector::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]));
        let n2 = c.xi.norm_squared() + c.tau.norm_squared();
        if n2 <= radius * radius && c.xi.norm() > 1e-3 {
            return c;
        }
    }
}

fn oracle(ctx: &mut Ctx) -> Result<()> {
    let t0 = Instant::now();
    let n = 200;
    let (mut worst, mut coarse, mut fine) = (0f64, 0f64, 0f64);
    for _ in 0..n {
        let p0 = random_covector(&mut ctx.rng, 2.0);
        let exact = exp_map(&p0, 1.0);
        worst = worst.max(exp_map_ode(&p0, 1.0, 1000)?.euclidean_distance(&exact));
        coarse += exp_map_ode(&p0, 1.0, 10)?.euclidean_distance(&exact);
        fine += exp_map_ode(&p0, 1.0, 20)?.euclidean_distance(&exact);
    }
    ctx.within("exp_map_vs_ode", worst, 1e-8, n, t0, "1000 RK4 steps".into());
    let order = (coarse / fine).log2();
    ctx.within("ode_order", (order - 4.0).abs(), 0.3, n, t0, format!("observed order {order:.3} (10 vs 20 steps)"));

    let t0 = Instant::now();
    let n = 50;
    let mut err: f64 = 0.0;
    for _ in 0..n {
        let cp = random_cut_point(&mut ctx.rng);
        let exact = cut_distance(&cp);
        let shot = distance(cp.point(), &ctx.cfg.shooting)?;
        err = err.max((shot.distance - exact).abs() / exact.max(1.0));
    }
    ctx.within("shooting_on_cut_locus", err, 1e-6, n, t0, String::new());

    let mut err: f64 = 0.0;
    let t1 = Instant::now();
    for _ in 0..n {
        let params = random_params(&mut ctx.rng);
        let s = t_cut(&params).value() * ctx.rng.gen_range(0.2..0.95);
        let tr = &params.triple;
        let exact = s * (tr.a().norm_squared() + tr.z().norm_squared()).sqrt();
        let shot = distance(&extremal_point(&params, s), &ctx.cfg.shooting)?;
        err = err.max((shot.distance - exact).abs() / exact.max(1.0));
    }
    ctx.within("shooting_before_cut", err, 1e-6, n, t1, String::new());
    ctx.budget("shooting_seconds", t0.elapsed().as_secs_f64(), 120.0, 2 * n);

    let t0 = Instant::now();
    let params = random_params(&mut ctx.rng);
    let target = extremal_point(&params, 0.7 * t_cut(&params).value());
    let base = distance(&target, &ctx.cfg.shooting)?.distance;
    let doubled = distance(&dilate(2.0, &target)?, &ctx.cfg.shooting)?.distance;
    ctx.within("shooting_dilation", (doubled - 2.0 * base).abs() / base, 1e-5, 1, t0, "relative".into());
    Ok(())
}

fn corner(ctx: &mut Ctx) -> Result<()> {
    let t0 = Instant::now();
    let (c1, _) = corner_coeffs(PI)?;
    ctx.within("c1_at_pi", (c1 - 1.0 / PI).abs(), 1e-12, 1, t0, String::new());

    let t0 = Instant::now();
    let n = 20;
    let (mut nonpositive, mut slope_full) = (0, 0f64);
    let mut half_ratio = (f64::INFINITY, 0f64);
    let mut bases = Vec::with_capacity(n);
    for _ in 0..n {
        let cp = random_cut_point(&mut ctx.rng);
        let base = CornerCurveParams::from_cut_point(&cp)?;
        let (c1, _) = base.coeffs();
        let k = base.decrease_rate();
        if !(c1 > 0.0 && k > 0.0) {
            nonpositive += 1;
        }
        let d = base.base_distance();
        let sigma = 1e-6 * base.sigma_max();
        let slope = (d - base.upper_bound(sigma)) / sigma;
        let r = slope / (k / (2.0 * d));
        half_ratio = (half_ratio.0.min(r), half_ratio.1.max(r));
        slope_full = slope_full.max((slope / (k / d) - 1.0).abs());
        bases.push(base);
    }
    ctx.count("c1_and_rate_positive", nonpositive, n, t0, String::new());
    let note = format!(
        "relative mismatch against K/d; slope/(K/(2d)) ranges over [{:.6}, {:.6}]",
        half_ratio.0, half_ratio.1
    );
    ctx.within("slope_matches_rate_over_d", slope_full, 1e-2, n, t0, note);

    let t0 = Instant::now();
    let mut excess: f64 = 0.0;
    let mut shots = 0;
    for base in bases.iter().take(3) {
        for sigma in [1e-2, 1e-3] {
            let sigma = sigma * base.sigma_max().min(1.0);
            let shot = distance(&corner_curve(base, sigma)?, &ctx.cfg.shooting)?.distance;
            excess = excess.max(shot - base.upper_bound(sigma));
            shots += 1;
        }
    }
    ctx.within("shooting_below_bound", excess.max(0.0), 1e-7, shots, t0, "max(shooting - bound)".into());

    let t0 = Instant::now();
    let (mut positive, mut ratio_err, mut asym) = (0, 0f64, 0f64);
    let mut shot_pairs = 0;
    for (i, base) in bases.iter().take(10).enumerate() {
        let s0 = 1e-2 * base.sigma_max().min(1.0);
        let sigmas: Vec<f64> = (0..5).map(|k| s0 / 2f64.powi(k)).collect();
        // shooting both sides of the half-turn is the costly part; sample it
        let shooting = (i < 3).then_some(&ctx.cfg.shooting);
        let rows = semiconvexity_probe(base, &sigmas, shooting)?;
        positive += rows.iter().filter(|r| !(r.quotient < 0.0)).count();
        for gap in rows.iter().filter_map(|r| r.symmetry_gap) {
            asym = asym.max(gap);
            shot_pairs += 1;
        }
        for w in rows.windows(2) {
            ratio_err = ratio_err.max((w[1].quotient / w[0].quotient - 2.0).abs());
        }
    }
    ctx.count("semiconvexity_quotient_negative", positive, 50, t0, String::new());
    ctx.within("semiconvexity_dyadic_ratio", ratio_err, 0.3, 40, t0, "|ratio - 2|".into());
    ctx.within("semiconvexity_symmetry", asym, 1e-9, shot_pairs, t0, "|d(p) - d(Mp)| by shooting".into());
    Ok(())
}
