use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

use carnot_cut::algebra::{dilate, GroupPoint};
use carnot_cut::scalars::{p, q};
use carnot_cut::solver::{distance, ShootingConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carnot-cut")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Root of `f = target` on `[lo, hi]` for increasing `f`, by bisection.
fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn phi1() -> f64 {
    bisect(|x| -(x.sin() - x * x.cos()), 0.0, PI, 1.5 * PI)
}

#[test]
fn dist_examples() {
    let r = json(&["dist", "0", "0", "0", "0", "0", "0.0795775"]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["method"], "formula");
    assert!((num(&r["result"]["distance"]) - 1.0).abs() < 1e-6);

    let r = json(&["dist", "1", "0", "0", "0", "0", "0"]);
    assert_eq!(r["provenance"], "shooting");
    assert!((num(&r["result"]["distance"]) - 1.0).abs() < 1e-8);

    let r = json(&["dist", "0", "0", "1", "1", "0", "0", "--model", "wedge"]);
    assert_eq!(r["result"]["method"], "formula");
    let theta = bisect(|t| p(t).unwrap(), 1.0, PI + 1e-12, phi1() - 1e-9);
    assert!((num(&r["result"]["theta"]) - theta).abs() < 1e-10);
}

#[test]
fn dist_models_and_methods_agree() {
    // wedge t12 is the cross-model t3
    let w = json(&["dist", "0.3", "-0.2", "0", "0", "0", "0.4", "--method", "shooting"]);
    let c = json(&["dist", "0.3", "-0.2", "0", "0.4", "0", "0", "--model", "cross", "--method", "shooting"]);
    assert!((num(&w["result"]["distance"]) - num(&c["result"]["distance"])).abs() < 1e-9);

    let f = json(&["dist", "0", "0", "-0.5", "0.7", "0", "0", "--method", "formula"]);
    let s = json(&["dist", "0", "0", "-0.5", "0.7", "0", "0", "--method", "shooting"]);
    assert!((num(&f["result"]["distance"]) - num(&s["result"]["distance"])).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dist", "0", "0", "0", "0", "0", "0"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "1", "2"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "1", "0", "0", "0", "0", "0", "--method", "formula"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
    let out = run(&["cut-time", "1", "0", "0", "1", "1", "0", "0", "0", "1", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("|a|"));
    let out = run(&["dist", "0.2", "0", "0", "0", "0.1", "0", "--method", "shooting", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cut_time_examples() {
    let r = json(&["cut-time", "1", "0", "0", "0", "1", "0", "0", "0", "0", "2"]);
    assert!((num(&r["result"]["t_cut"]) - PI / 2.0).abs() < 1e-12);

    let r = json(&["cut-time", "1", "0", "0", "0", "1", "0", "0", "0", "1", "1"]);
    let q_inv_1 = bisect(|t| q(t).unwrap(), 1.0, PI, phi1() - 1e-9);
    assert!((num(&r["result"]["t_cut"]) - q_inv_1).abs() < 1e-10);
    assert!((num(&r["result"]["theta"]) - q_inv_1).abs() < 1e-10);
    assert!(r["result"]["cut_point"]["x"].is_array());

    let r = json(&["cut-time", "0", "0", "0", "0", "0", "0", "0", "0", "1", "0"]);
    assert_eq!(r["result"]["t_cut"], "infinite");
}

#[test]
fn geodesic_rows() {
    let out = run(&["geodesic", "1", "0", "0", "0", "1", "0", "0", "0", "0", "1", "--s-max", "0", "--samples", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,x1,x2,x3,t12,t13,t23,speed,past_cut");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| *l == lines[1]));

    let pi = PI.to_string();
    let r = json(&["geodesic", "1", "0", "0", "0", "1", "0", "0", "0", "0", &pi, "--s-max", "1", "--samples", "11"]);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let s: Vec<f64> = rows.iter().map(|row| num(&row["s"])).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]));
    let last = rows.last().unwrap();
    for k in ["x1", "x2", "x3"] {
        assert!(num(&last[k]).abs() < 1e-12);
    }
    assert_eq!(last["past_cut"], false);
    assert!(run(&["geodesic", "1", "0", "0", "0", "1", "0", "0", "0", "0", "1", "--samples", "1"]).status.code() == Some(2));
}

fn sphere_points(r: &str) -> Vec<(GroupPoint, bool)> {
    let v = json(&["sphere", r, "--n-theta", "5", "--n-mu", "3", "--n-angle", "2"]);
    v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| {
            let c = ["x1", "x2", "x3", "t12", "t13", "t23"].map(|k| num(&row[k]));
            (GroupPoint::from_coords(c), row["at_cut_cap"].as_bool().unwrap())
        })
        .collect()
}

#[test]
fn sphere_profile() {
    let unit = sphere_points("1");
    let cap = 1.0 / (4.0 * PI);
    for sign in [1.0, -1.0] {
        assert!(unit.iter().any(|(p, at_cap)| *at_cap
            && p.x.norm() < 1e-12
            && (p.t.to_array()[0] - sign * cap).abs() < 1e-12
            && p.t.to_array()[1].abs() < 1e-12
            && p.t.to_array()[2].abs() < 1e-12));
    }
    let double = sphere_points("2");
    assert_eq!(unit.len(), double.len());
    for ((p1, c1), (p2, c2)) in unit.iter().zip(&double) {
        assert_eq!(c1, c2);
        assert!(dilate(2.0, p1).unwrap().euclidean_distance(p2) < 1e-12);
    }
    let cfg = ShootingConfig::default();
    for (p, _) in unit.iter().step_by(7) {
        assert!((distance(p, &cfg).unwrap().distance - 1.0).abs() < 1e-5);
    }
}

#[test]
fn verify_suites() {
    let out = run(&["verify", "scalars", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,name,passed,"));
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));

    let a = run(&["verify", "oracle", "--seed", "7"]);
    let b = run(&["verify", "oracle", "--seed", "7"]);
    assert!(a.status.success());
    let strip = |o: &Output| -> Value {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        // timings are excluded from comparison
        for row in v["rows"].as_array_mut().unwrap() {
            row.as_object_mut().unwrap().remove("seconds");
        }
        v
    };
    assert_eq!(strip(&a), strip(&b));

    let r = json(&["verify", "corner"]);
    assert_eq!(r["result"]["passed"], true);
    assert!(r["rows"].as_array().unwrap().iter().any(|row| row["name"] == "slope_matches_rate_over_d"));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let args = ["dist", "0.4", "0.1", "-0.3", "0.2", "-0.1", "0.05", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dist.csv");
    let path_str = path.to_str().unwrap();
    let mut with_out = args.to_vec();
    with_out.extend(["--format", "csv", "--out", path_str]);
    let out = run(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), row.len());
    let i = header.iter().position(|h| *h == "distance").unwrap();
    let json_dist = num(&serde_json::from_slice::<Value>(&a.stdout).unwrap()["result"]["distance"]);
    assert_eq!(row[i].parse::<f64>().unwrap(), json_dist);
}
