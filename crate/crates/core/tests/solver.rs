use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use carnot_cut::algebra::{dilate, from_cross, group_mul, rotate, CrossPoint, GroupPoint};
use carnot_cut::cutlocus::{cut_distance, t_cut};
use carnot_cut::geodesics::extremal_point;
use carnot_cut::hamiltonian::{cut_time, exp_map, hamiltonian, Covector};
use carnot_cut::sampling::{random_cut_point, random_params, random_rotation, random_unit};
use carnot_cut::solver::{distance, length_lower_bound, ShootingConfig};

fn shoot(p: &GroupPoint) -> f64 {
    distance(p, &ShootingConfig::default()).unwrap().distance
}

/// Endpoint of a minimizer stopped at a random fraction of its cut time.
fn reachable(rng: &mut ChaCha8Rng) -> GroupPoint {
    let pr = random_params(rng);
    let s = t_cut(&pr).value() * rng.gen_range(0.1..0.9);
    extremal_point(&pr, s)
}

#[test]
fn dilation_homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..10 {
        let p = reachable(&mut rng);
        let r = rng.gen_range(0.2..5.0);
        let d = shoot(&p);
        let dr = shoot(&dilate(r, &p).unwrap());
        assert!((dr - r * d).abs() <= 1e-5 * r * d, "{dr} vs {}", r * d);
    }
}

#[test]
fn rotation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..10 {
        let p = reachable(&mut rng);
        let m = random_rotation(&mut rng);
        let d = shoot(&p);
        let dm = shoot(&rotate(&m, &p).unwrap());
        assert!((dm - d).abs() <= 1e-6, "{dm} vs {d}");
    }
}

#[test]
fn triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for _ in 0..10 {
        let p = reachable(&mut rng);
        let q = reachable(&mut rng);
        // d(0, pq) ≤ d(0, p) + d(p, pq) = d(0, p) + d(0, q)
        let pq = group_mul(&p, &q);
        assert!(shoot(&pq) <= shoot(&p) + shoot(&q) + 1e-6);
    }
}

#[test]
fn minimal_before_cut_and_not_after() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    let mut checked = 0;
    while checked < 10 {
        let xi = random_unit(&mut rng) * rng.gen_range(0.3..2.0);
        let tau = random_unit(&mut rng) * rng.gen_range(0.3..4.0);
        let p0 = Covector::new(xi, tau);
        let tc = cut_time(&p0).unwrap().value();
        if !tc.is_finite() {
            continue;
        }
        let speed = (2.0 * hamiltonian(&CrossPoint::origin(), &p0)).sqrt();
        let before = 0.7 * tc;
        let d = shoot(&from_cross(&exp_map(&p0, before)));
        assert!((d - before * speed).abs() <= 1e-6, "{d} vs {}", before * speed);
        let after = 1.05 * tc;
        let d = shoot(&from_cross(&exp_map(&p0, after)));
        assert!(d < after * speed - 1e-6, "{d} vs {}", after * speed);
        checked += 1;
    }
}

#[test]
fn agrees_with_closed_form_on_cut_locus() {
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    for _ in 0..10 {
        let cp = random_cut_point(&mut rng);
        let r = distance(cp.point(), &ShootingConfig::default()).unwrap();
        let exact = cut_distance(&cp);
        assert!((r.distance - exact).abs() <= 1e-6 * exact.max(1.0));
        assert!(r.residual <= ShootingConfig::default().tol);
        assert!(r.distance >= length_lower_bound(cp.point()) * (1.0 - 1e-9));
    }
}

#[test]
fn seeds_and_thread_counts_do_not_change_the_answer() {
    let mut rng = ChaCha8Rng::seed_from_u64(206);
    let p = reachable(&mut rng);
    let base = distance(&p, &ShootingConfig::default()).unwrap();
    let again = distance(&p, &ShootingConfig::default()).unwrap();
    assert_eq!(base.distance.to_bits(), again.distance.to_bits());
    let threaded = distance(&p, &ShootingConfig { threads: Some(2), ..Default::default() }).unwrap();
    assert_eq!(base.distance.to_bits(), threaded.distance.to_bits());
    let other = distance(&p, &ShootingConfig { seed: 99, ..Default::default() }).unwrap();
    assert!((other.distance - base.distance).abs() <= 1e-9);
}
