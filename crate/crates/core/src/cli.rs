//! Command-line front end.
//!
//! Records are written as one JSON object (floats with 17 significant digits)
//! or as CSV with a header row. Exit codes: 0 success, 1 failed verification
//! or I/O error, 2 invalid input, 3 solver non-convergence.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::{from_cross, to_cross, CrossPoint, GroupPoint, Vec3};
use crate::cutlocus::{
    cut_distance, h_cut, is_cut, sphere_profile, t_cut, CutPoint, CutTime, SphereGrid, DEFAULT_CUT_TOL,
};
use crate::error::Error;
use crate::geodesics::{control, extremal_point, ExtremalParams};
use crate::solver::{distance, ShootingConfig};
use crate::verify::{self, Suite, VerifyConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "carnot-cut",
    version,
    about = "Cut locus, cut times and distances in the free step-two Carnot group of rank 3",
    after_help = "Coordinates: a point is x1 x2 x3 followed by three t coordinates, \
                  (t12, t13, t23) in the wedge model or (t1, t2, t3) in the cross model.\n\
                  Exit codes: 0 success, 1 failed verification or I/O error, 2 invalid input, \
                  3 solver non-convergence.\n\
                  CARNOT_CUT_THREADS caps the number of threads used by shooting restarts."
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Coordinates of the t component: wedge (t12, t13, t23) or cross (t1, t2, t3).
    #[arg(long, value_enum, default_value_t = Model::Wedge, global = true)]
    pub model: Model,
    #[arg(long, value_enum, default_value_t = Method::Auto, global = true)]
    pub method: Method,
    /// Cut-locus membership and shooting residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the record to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Wedge,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Formula,
    Shooting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance from the origin to (x, t).
    #[command(allow_negative_numbers = true)]
    Dist {
        #[arg(num_args = 6, required = true, value_names = ["X1", "X2", "X3", "T1", "T2", "T3"])]
        coords: Vec<f64>,
    },
    /// Cut time of the extremal with control a cos(2φs) + b sin(2φs) + z.
    #[command(allow_negative_numbers = true)]
    CutTime {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Samples of an extremal curve.
    #[command(allow_negative_numbers = true)]
    Geodesic {
        #[command(flatten)]
        params: ParamArgs,
        /// Last sample time; defaults to the cut time, or 1 when it is infinite.
        #[arg(long)]
        s_max: Option<f64>,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Point cloud on the sphere of radius r.
    Sphere {
        r: f64,
        #[arg(long, default_value_t = 16)]
        n_theta: usize,
        #[arg(long, default_value_t = 8)]
        n_mu: usize,
        #[arg(long, default_value_t = 1e-2)]
        mu_min: f64,
        #[arg(long, default_value_t = 10.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 1)]
        n_angle: usize,
    },
    /// Run a self-check suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Multiplies every tolerance of the suite.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// a1 a2 a3 b1 b2 b3 z1 z2 z3 phi
    #[arg(num_args = 10, required = true, value_names = ["A1", "A2", "A3", "B1", "B2", "B3", "Z1", "Z2", "Z3", "PHI"])]
    values: Vec<f64>,
}

impl ParamArgs {
    fn parse(&self) -> Result<ExtremalParams, Error> {
        let v = &self.values;
        let vec = |i: usize| Vec3::new(v[i], v[i + 1], v[i + 2]);
        ExtremalParams::from_vectors(vec(0), vec(3), vec(6), v[9])
    }

    fn echo(&self) -> Value {
        let v = &self.values;
        json!({ "a": &v[0..3], "b": &v[3..6], "z": &v[6..9], "phi": v[9] })
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

/// A command's record before rendering. `table` rows are shared by both
/// formats; the other fields only appear in JSON (CSV flattens `result` when
/// there is no table).
struct Output {
    command: &'static str,
    input: Value,
    provenance: &'static str,
    result: Map<String, Value>,
    table: Option<Table>,
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let opts = &cli.opts;
    if let Some(tol) = opts.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Domain {
                what: "tol",
                constraint: "positive and finite",
                value: tol,
            }
            .into());
        }
    }
    let (output, code) = match &cli.command {
        Command::Dist { coords } => (dist(coords, opts)?, 0),
        Command::CutTime { params } => (cut_time_cmd(params, opts)?, 0),
        Command::Geodesic { params, s_max, samples } => (geodesic(params, *s_max, *samples, opts)?, 0),
        Command::Sphere {
            r,
            n_theta,
            n_mu,
            mu_min,
            mu_max,
            n_angle,
        } => {
            let grid = SphereGrid {
                n_theta: *n_theta,
                n_mu: *n_mu,
                mu_min: *mu_min,
                mu_max: *mu_max,
                n_angle: *n_angle,
                parallel: true,
            };
            (sphere(*r, &grid, opts)?, 0)
        }
        Command::Verify { suite, tol_scale } => verify_cmd(*suite, *tol_scale, opts)?,
    };
    let text = match opts.format {
        Format::Json => render_json(&output),
        Format::Csv => render_csv(&output),
    };
    match &opts.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn shooting_config(opts: &GlobalOpts) -> ShootingConfig {
    let mut cfg = ShootingConfig {
        seed: opts.seed,
        ..Default::default()
    };
    if let Some(tol) = opts.tol {
        cfg.tol = tol;
    }
    cfg
}

fn point_from(coords: &[f64], model: Model) -> GroupPoint {
    let c: [f64; 6] = coords.try_into().expect("clap enforces six values");
    match model {
        Model::Wedge => GroupPoint::from_coords(c),
        Model::Cross => from_cross(&CrossPoint::from_coords(c)),
    }
}

fn point_coords(p: &GroupPoint, model: Model) -> [f64; 6] {
    match model {
        Model::Wedge => p.coords(),
        Model::Cross => to_cross(p).coords(),
    }
}

fn point_columns(model: Model) -> [&'static str; 6] {
    match model {
        Model::Wedge => ["x1", "x2", "x3", "t12", "t13", "t23"],
        Model::Cross => ["x1", "x2", "x3", "t1", "t2", "t3"],
    }
}

fn point_json(p: &GroupPoint, model: Model) -> Value {
    let c = point_coords(p, model);
    json!({ "x": &c[0..3], "t": &c[3..6] })
}

fn require_finite(values: &[f64], what: &str) -> Result<(), Failure> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} must be finite")).into())
    }
}

fn dist(coords: &[f64], opts: &GlobalOpts) -> Result<Output, Failure> {
    require_finite(coords, "coordinates")?;
    let point = point_from(coords, opts.model);
    if point.x.norm() == 0.0 && point.t.norm() == 0.0 {
        return Err(Error::OriginTarget.into());
    }
    let tol = opts.tol.unwrap_or(DEFAULT_CUT_TOL);
    let use_formula = match opts.method {
        Method::Formula => true,
        Method::Shooting => false,
        Method::Auto => is_cut(&point, tol),
    };
    let mut result = Map::new();
    let provenance = if use_formula {
        let cp = CutPoint::with_tol(point, tol)?;
        result.insert("distance".into(), json!(cut_distance(&cp)));
        result.insert("method".into(), json!("formula"));
        result.insert("theta".into(), json!(cp.theta()));
        result.insert("near_pole".into(), json!(cp.near_pole()));
        "formula"
    } else {
        let r = distance(&point, &shooting_config(opts))?;
        result.insert("distance".into(), json!(r.distance));
        result.insert("method".into(), json!("shooting"));
        result.insert("residual".into(), json!(r.residual));
        result.insert("xi".into(), json!(r.minimizer.xi.as_slice()));
        result.insert("tau".into(), json!(r.minimizer.tau.as_slice()));
        result.insert("restarts_used".into(), json!(r.restarts_used));
        result.insert("accepted".into(), json!(r.accepted));
        "shooting"
    };
    Ok(Output {
        command: "dist",
        input: json!({ "coords": coords, "model": opts.model, "method": opts.method }),
        provenance,
        result,
        table: None,
    })
}

fn cut_time_cmd(params: &ParamArgs, opts: &GlobalOpts) -> Result<Output, Failure> {
    require_finite(&params.values, "parameters")?;
    let p = params.parse()?;
    let mut result = Map::new();
    match t_cut(&p) {
        CutTime::Infinite => {
            result.insert("t_cut".into(), json!("infinite"));
        }
        CutTime::Finite(s) => {
            let mu = p.triple.z().norm() / p.triple.a().norm();
            result.insert("t_cut".into(), json!(s));
            result.insert("theta".into(), json!(h_cut(mu)?));
            result.insert("cut_point".into(), point_json(&extremal_point(&p, s), opts.model));
        }
    }
    Ok(Output {
        command: "cut_time",
        input: params.echo(),
        provenance: "closed_form",
        result,
        table: None,
    })
}

fn geodesic(params: &ParamArgs, s_max: Option<f64>, samples: usize, opts: &GlobalOpts) -> Result<Output, Failure> {
    require_finite(&params.values, "parameters")?;
    if samples < 2 {
        return Err(Error::Invalid(format!("at least 2 samples are required, got {samples}")).into());
    }
    let p = params.parse()?;
    let tc = t_cut(&p);
    let s_max = s_max.unwrap_or(if tc.is_finite() { tc.value() } else { 1.0 });
    if !(s_max >= 0.0 && s_max.is_finite()) {
        return Err(Error::Domain {
            what: "s_max",
            constraint: "finite and >= 0",
            value: s_max,
        }
        .into());
    }
    let mut columns = vec!["s".to_string()];
    columns.extend(point_columns(opts.model).iter().map(|c| c.to_string()));
    columns.push("speed".into());
    columns.push("past_cut".into());
    let rows = (0..samples)
        .map(|i| {
            let s = s_max * i as f64 / (samples - 1) as f64;
            let mut row: Vec<Value> = vec![json!(s)];
            row.extend(point_coords(&extremal_point(&p, s), opts.model).iter().map(|v| json!(v)));
            row.push(json!(control(&p, s).norm()));
            row.push(json!(tc.is_finite() && s > tc.value()));
            row
        })
        .collect();
    let mut result = Map::new();
    result.insert(
        "t_cut".into(),
        if tc.is_finite() { json!(tc.value()) } else { json!("infinite") },
    );
    Ok(Output {
        command: "geodesic",
        input: json!({ "params": params.echo(), "s_max": s_max, "samples": samples, "model": opts.model }),
        provenance: "closed_form",
        result,
        table: Some(Table { columns, rows }),
    })
}

fn sphere(r: f64, grid: &SphereGrid, opts: &GlobalOpts) -> Result<Output, Failure> {
    let points = sphere_profile(r, grid)?;
    let mut columns: Vec<String> = point_columns(opts.model).iter().map(|c| c.to_string()).collect();
    columns.extend(["theta", "mu", "at_cut_cap"].map(String::from));
    let rows = points
        .iter()
        .map(|sp| {
            let mut row: Vec<Value> = point_coords(&sp.point, opts.model).iter().map(|v| json!(v)).collect();
            row.push(json!(sp.theta));
            row.push(json!(sp.mu));
            row.push(json!(sp.at_cut_cap));
            row
        })
        .collect();
    Ok(Output {
        command: "sphere",
        input: json!({
            "r": r,
            "n_theta": grid.n_theta,
            "n_mu": grid.n_mu,
            "mu_min": grid.mu_min,
            "mu_max": grid.mu_max,
            "n_angle": grid.n_angle,
            "model": opts.model,
        }),
        provenance: "closed_form",
        result: Map::new(),
        table: Some(Table { columns, rows }),
    })
}

fn verify_cmd(suite: Suite, tol_scale: f64, opts: &GlobalOpts) -> Result<(Output, i32), Failure> {
    let cfg = VerifyConfig {
        seed: opts.seed,
        tol_scale,
        shooting: shooting_config(opts),
    };
    let report = verify::run(suite, &cfg)?;
    let passed = report.passed();
    let columns = ["suite", "name", "passed", "observed", "tolerance", "cases", "seconds", "note"]
        .map(String::from)
        .to_vec();
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                json!(c.suite),
                json!(c.name),
                json!(c.passed),
                json!(c.observed),
                json!(c.tolerance),
                json!(c.cases),
                json!(c.seconds),
                json!(c.note),
            ]
        })
        .collect();
    let mut result = Map::new();
    result.insert("passed".into(), json!(passed));
    let output = Output {
        command: "verify",
        input: json!({ "suite": suite, "seed": opts.seed, "tol_scale": tol_scale }),
        provenance: "self_check",
        result,
        table: Some(Table { columns, rows }),
    };
    Ok((output, if passed { 0 } else { 1 }))
}

/// Compact JSON with every float written as `{:.16e}` (17 significant digits).
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn float_text(v: f64) -> String {
    format!("{v:.16e}")
}

fn render_json(out: &Output) -> String {
    let mut record = Map::new();
    record.insert("schema_version".into(), json!(SCHEMA_VERSION));
    record.insert("command".into(), json!(out.command));
    record.insert("input".into(), out.input.clone());
    record.insert("provenance".into(), json!(out.provenance));
    record.insert("result".into(), Value::Object(out.result.clone()));
    if let Some(t) = &out.table {
        let rows: Vec<Value> = t
            .rows
            .iter()
            .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        record.insert("rows".into(), Value::Array(rows));
    }
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    Value::Object(record).serialize(&mut ser).expect("values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => float_text(n.as_f64().expect("checked f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

/// Tables become one CSV row per entry; scalar results become a single row.
fn render_csv(out: &Output) -> String {
    let (columns, rows) = match &out.table {
        Some(t) => (t.columns.clone(), t.rows.clone()),
        None => {
            let mut columns = vec!["command".to_string(), "provenance".to_string()];
            let mut row = vec![json!(out.command), json!(out.provenance)];
            for (k, v) in &out.result {
                match v {
                    Value::Object(inner) => {
                        for (ik, iv) in inner {
                            columns.push(format!("{k}_{ik}"));
                            row.push(iv.clone());
                        }
                    }
                    _ => {
                        columns.push(k.clone());
                        row.push(v.clone());
                    }
                }
            }
            (columns, vec![row])
        }
    };
    let mut s = columns.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.iter().map(csv_cell).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}
