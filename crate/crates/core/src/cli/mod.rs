//! Batch front end: space specs, command dispatch and JSON/CSV reports.
//!
//! The `obtuse` binary is a thin wrapper around [`main_with_args`].

mod report;
mod spec;

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::invariants::{
    growth_report, kappa_obtuse_infinity, obtuse_compact, obtuse_from_infinity, pair_obtuse, InvariantEstimate,
    PairLadder, QueryTemplate, Space, Variant, CONVENTION_NOTES,
};
use crate::model::{comparison_angle, strainer_constants, theta_n, Curvature, HPoint, Side, SideTriple};
use crate::revsurface::{asymptotic_profile, integrate_geodesic, GeodesicState, RayProbe, SurfacePoint};

pub use spec::{parse_space_spec, SpaceHandle, SpaceKind, SpaceSpec};

/// Subcommands.
#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Distance and minimal directions from --p to --q.
    Dist,
    /// Integrate the geodesic from --p at --direction for --length.
    Geodesic,
    /// Angle and comparison angle at --p between --q and --x.
    Angle,
    /// Pair obtuse estimate for --p, --q.
    ObtusePair,
    /// Obtuse constant from infinity over a pair ladder.
    ObtuseInf,
    /// Obtuse constant of a compact space.
    ObtuseCompact,
    /// Comparison kappa-obtuse constant from infinity.
    KappaObtuse,
    /// Volume growth, ideal boundary and total curvature.
    Growth,
    /// Total curvature with its independent quadrature.
    Totcurv,
    /// Ray test and ray-direction measure at --p.
    Rays,
    /// Integral constant and angle threshold from --n, --D, --rmin, --v1.
    Constants,
    /// Run every acceptance criterion.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Switch {
    On,
    Off,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    Angle,
    Comparison,
}

#[derive(Parser, Debug)]
#[command(name = "obtuse", version, about = "Obtuse constants, volume growth and total curvature of model spaces")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

/// Flags shared by every subcommand.
#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Space spec: a JSON file or inline JSON.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Far-radius ladder, increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub rfar: Option<Vec<f64>>,
    /// Samples per far curve.
    #[arg(long, global = true, default_value_t = 720)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance (integrator for geodesics, minimality for rays).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, global = true, default_value_t = 50.0)]
    pub horizon: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    #[arg(long = "convention-notes", global = true, value_enum, default_value_t = Switch::On)]
    pub convention_notes: Switch,
    /// Record wall time (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Point coordinates: (r, theta), (rho, phi) or (x, y).
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub p: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub q: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    /// Initial angle from the outward meridian.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub direction: f64,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub length: f64,
    /// Ray directions to test.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub directions: Option<Vec<f64>>,
    /// Pair separations, decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub separations: Option<Vec<f64>>,
    /// Pairs per separation (or population size for kappa-obtuse).
    #[arg(long, global = true, default_value_t = 36)]
    pub pairs: usize,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Angle)]
    pub variant: VariantArg,
    #[arg(long, global = true, default_value_t = 2)]
    pub n: u32,
    #[arg(long = "D", global = true, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, global = true, default_value_t = 0.5)]
    pub rmin: f64,
    #[arg(long, global = true, default_value_t = 0.1)]
    pub v1: f64,
}

/// Validated run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub rfar: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub kappa: Curvature,
    pub horizon: f64,
    pub out: Format,
    pub convention_notes: bool,
    pub timing: bool,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub direction: f64,
    pub length: f64,
    pub directions: Option<Vec<f64>>,
    pub separations: Option<Vec<f64>>,
    pub pairs: usize,
    pub variant: Variant,
    pub n: u32,
    pub d: f64,
    pub rmin: f64,
    pub v1: f64,
}

impl RunConfig {
    pub fn from_options(command: Command, o: &Options) -> Result<Self> {
        if let Some(r) = &o.rfar {
            if r.is_empty() || r.iter().any(|x| !(*x > 0.0)) || r.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Spec("--rfar must be positive and strictly increasing".into()));
            }
        }
        if let Some(s) = &o.separations {
            if s.is_empty() || s.iter().any(|x| !(*x > 0.0)) || s.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(Error::Spec("--separations must be positive and strictly decreasing".into()));
            }
        }
        if let Some(t) = o.tol {
            if !(t > 0.0) {
                return Err(Error::Spec("--tol must be positive".into()));
            }
        }
        if o.samples < 8 {
            return Err(Error::Spec("--samples must be at least 8".into()));
        }
        if o.pairs == 0 {
            return Err(Error::Spec("--pairs must be positive".into()));
        }
        Ok(Self {
            command,
            rfar: o.rfar.clone(),
            samples: o.samples,
            seed: o.seed,
            tol: o.tol,
            kappa: Curvature::new(o.kappa)?,
            horizon: o.horizon,
            out: o.out,
            convention_notes: o.convention_notes == Switch::On,
            timing: o.timing,
            p: o.p.clone(),
            q: o.q.clone(),
            x: o.x.clone(),
            direction: o.direction,
            length: o.length,
            directions: o.directions.clone(),
            separations: o.separations.clone(),
            pairs: o.pairs,
            variant: match o.variant {
                VariantArg::Angle => Variant::Angle,
                VariantArg::Comparison => Variant::Comparison,
            },
            n: o.n,
            d: o.d,
            rmin: o.rmin,
            v1: o.v1,
        })
    }

    /// Defaults for `command` with nothing else set.
    pub fn new(command: Command) -> Self {
        let args = Args::parse_from(["obtuse", "report"]);
        Self::from_options(command, &args.opts).expect("defaults are valid")
    }

    fn template(&self, spec: &SpaceSpec) -> QueryTemplate {
        QueryTemplate {
            kappa: self.kappa,
            far_radii: self.rfar.clone().unwrap_or_else(|| spec.default_far_radii()),
            samples_per_radius: self.samples,
            seed: self.seed,
        }
    }

    fn ladder(&self, spec: &SpaceSpec) -> PairLadder {
        PairLadder {
            separations: self.separations.clone().unwrap_or_else(|| spec.default_separations()),
            pairs_per_separation: self.pairs,
        }
    }
}

/// One output row.
pub type Record = Map<String, Value>;

/// Process exit code for an error: 2 spec, 3 capability, 4 non-convergence.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capability(_) => 3,
        Error::NoConvergence { .. } | Error::NotConverged { .. } | Error::DomainExit { .. } => 4,
        _ => 2,
    }
}

fn base_record(cfg: &RunConfig, spec: Option<&SpaceSpec>) -> Record {
    let mut r = Map::new();
    r.insert("command".into(), serde_json::to_value(cfg.command).expect("command serializes"));
    r.insert("spec".into(), spec.map_or(Value::Null, SpaceSpec::to_json));
    r.insert("seed".into(), Value::from(cfg.seed));
    r.insert("value".into(), Value::Null);
    r.insert("ladder".into(), Value::Null);
    r.insert("uncertainty".into(), Value::Null);
    r.insert(
        "convention_notes".into(),
        if cfg.convention_notes {
            Value::from(CONVENTION_NOTES)
        } else {
            Value::Null
        },
    );
    r.insert("wall_time".into(), Value::Null);
    r
}

fn put_estimate(r: &mut Record, est: &InvariantEstimate) {
    r.insert("value".into(), json!(est.value));
    let ladder: Vec<Value> = est
        .ladder
        .iter()
        .zip(&est.ladder_values)
        .map(|(a, b)| json!([a, b]))
        .collect();
    r.insert("ladder".into(), Value::Array(ladder));
    r.insert("uncertainty".into(), json!(est.uncertainty));
    r.insert("monotone".into(), json!(est.monotone));
}

fn need(v: &Option<Vec<f64>>, name: &str) -> Result<[f64; 2]> {
    match v.as_deref() {
        Some([a, b]) => Ok([*a, *b]),
        Some(_) => Err(Error::Spec(format!("--{name} takes two comma-separated numbers"))),
        None => Err(Error::Spec(format!("missing --{name}"))),
    }
}

/// Run one command. `report` ignores `spec`; `constants` does not need one.
pub fn run_command(cfg: &RunConfig, spec: Option<&SpaceSpec>) -> Result<Vec<Record>> {
    let start = Instant::now();
    let mut rows = match cfg.command {
        Command::Report => report::acceptance_rows(cfg)?,
        Command::Constants => vec![constants(cfg)?],
        _ => {
            let spec = spec.ok_or_else(|| Error::Spec("missing --space".into()))?;
            let mut rec = base_record(cfg, Some(spec));
            match spec.build()? {
                SpaceHandle::Surface(s) => {
                    let surface = s.surface().clone();
                    match cfg.command {
                        Command::Geodesic => geodesic(cfg, &surface, &mut rec)?,
                        Command::Rays => rays(cfg, &surface, &mut rec)?,
                        Command::Totcurv if !surface.is_compact() => {
                            let a = asymptotic_profile(&surface)?;
                            rec.insert("value".into(), json!(a.total_curvature));
                            rec.insert("ladder".into(), json!(a.ladder));
                            rec.insert("uncertainty".into(), json!((a.total_curvature - a.curvature_quadrature).abs()));
                            rec.insert("curvature_quadrature".into(), json!(a.curvature_quadrature));
                            rec.insert("ideal_boundary_length".into(), json!(a.ideal_boundary_length));
                            rec.insert("m_prime_limit".into(), json!(a.m_prime_limit));
                        }
                        _ => generic(cfg, spec, &*s, |[r, t]| Ok(SurfacePoint::new(r, t)), &mut rec)?,
                    }
                }
                SpaceHandle::Cone(s) => {
                    let cone = *s.cone();
                    generic(cfg, spec, &s, |[rho, phi]| cone.point(rho, phi), &mut rec)?
                }
                SpaceHandle::Triangle(s) => generic(cfg, spec, &s, |[x, y]| HPoint::new(x, y), &mut rec)?,
            }
            vec![rec]
        }
    };
    if cfg.timing {
        let t = start.elapsed().as_secs_f64();
        for r in &mut rows {
            r.insert("wall_time".into(), json!(t));
        }
    }
    Ok(rows)
}

fn generic<S: Space>(
    cfg: &RunConfig,
    spec: &SpaceSpec,
    space: &S,
    point: impl Fn([f64; 2]) -> Result<S::Point>,
    rec: &mut Record,
) -> Result<()> {
    match cfg.command {
        Command::Dist => {
            let (p, q) = (point(need(&cfg.p, "p")?)?, point(need(&cfg.q, "q")?)?);
            rec.insert("value".into(), json!(space.distance(&p, &q)?));
            if space.has_angles() {
                rec.insert("directions".into(), json!(space.minimal_directions(&p, &q)?));
            }
        }
        Command::Angle => {
            let p = point(need(&cfg.p, "p")?)?;
            let q = point(need(&cfg.q, "q")?)?;
            let x = point(need(&cfg.x, "x")?)?;
            let (a, b, c) = (space.distance(&p, &q)?, space.distance(&p, &x)?, space.distance(&q, &x)?);
            let c = c.clamp((a - b).abs(), a + b);
            let sides = SideTriple::new(a, b, c, cfg.kappa)?;
            let cmp = comparison_angle(cfg.kappa, &sides, Side::C)?;
            rec.insert("comparison_angle".into(), json!(cmp));
            if space.has_angles() {
                let dq = space.minimal_directions(&p, &q)?;
                let dx = space.minimal_directions(&p, &x)?;
                let mut angle = f64::INFINITY;
                for u in &dq {
                    for v in &dx {
                        angle = angle.min(space.direction_angle(&p, *u, *v));
                    }
                }
                rec.insert("value".into(), json!(angle));
            } else {
                rec.insert("value".into(), json!(cmp));
            }
        }
        Command::ObtusePair => {
            let (p, q) = (point(need(&cfg.p, "p")?)?, point(need(&cfg.q, "q")?)?);
            let est = pair_obtuse(space, &cfg.template(spec).at(p, q), cfg.variant)?;
            put_estimate(rec, &est);
        }
        Command::ObtuseInf => {
            let est = obtuse_from_infinity(space, &cfg.ladder(spec), &cfg.template(spec), cfg.variant)?;
            put_estimate(rec, &est);
        }
        Command::ObtuseCompact => {
            let est = obtuse_compact(space, &cfg.ladder(spec), &cfg.template(spec), cfg.variant)?;
            put_estimate(rec, &est);
        }
        Command::KappaObtuse => {
            let pairs = space.pair_population(cfg.pairs, cfg.seed)?;
            let est = kappa_obtuse_infinity(space, cfg.kappa, &pairs, &cfg.template(spec))?;
            put_estimate(rec, &est);
        }
        Command::Growth | Command::Totcurv => {
            let g = growth_report(space)?;
            let main = if cfg.command == Command::Growth {
                g.v_inf.or(g.normalized_volume)
            } else {
                g.total_curvature
            };
            rec.insert("value".into(), json!(main));
            rec.insert("v_inf".into(), json!(g.v_inf));
            rec.insert("ideal_boundary_length".into(), json!(g.ideal_boundary_length));
            rec.insert("total_curvature".into(), json!(g.total_curvature));
            rec.insert("normalized_volume".into(), json!(g.normalized_volume));
        }
        Command::Geodesic | Command::Rays => return Err(Error::Capability("surface of revolution")),
        Command::Constants | Command::Report => unreachable!("handled without a space"),
    }
    Ok(())
}

fn geodesic(cfg: &RunConfig, surface: &crate::revsurface::ProfileSurface, rec: &mut Record) -> Result<()> {
    let [r, t] = need(&cfg.p, "p")?;
    let init = GeodesicState::from_direction(surface, SurfacePoint::new(r, t), cfg.direction)?;
    let path = integrate_geodesic(surface, &init, cfg.length, cfg.tol.unwrap_or(1e-10))?;
    let end = path.end();
    let trace: Vec<Value> = (0..=16)
        .map(|i| {
            let s = path.at(path.length * i as f64 / 16.0);
            json!([s.s, s.point.r, s.point.theta])
        })
        .collect();
    rec.insert("value".into(), json!(path.length));
    rec.insert("end".into(), json!([end.point.r, end.point.theta]));
    rec.insert("theta_unwrapped".into(), json!(end.theta_unwrapped));
    rec.insert("winding".into(), json!(path.winding));
    rec.insert("clairaut".into(), json!(init.nu));
    rec.insert("clairaut_drift".into(), json!(path.clairaut_drift(surface)));
    rec.insert("speed_drift".into(), json!(path.speed_drift(surface)));
    rec.insert("path".into(), Value::Array(trace));
    Ok(())
}

fn rays(cfg: &RunConfig, surface: &crate::revsurface::ProfileSurface, rec: &mut Record) -> Result<()> {
    let [r, t] = need(&cfg.p, "p")?;
    let probe = RayProbe::new(surface, SurfacePoint::new(r, t), cfg.horizon, cfg.tol.unwrap_or(1e-3))?;
    let dirs = cfg
        .directions
        .clone()
        .unwrap_or_else(|| vec![0.0, PI / 4.0, -PI / 4.0, PI / 2.0, -PI / 2.0]);
    let mut tested = Vec::new();
    for a in dirs {
        tested.push(json!([a, probe.is_ray(a)?]));
    }
    let m = probe.measure()?;
    rec.insert("value".into(), json!(m.lower));
    rec.insert("measure".into(), json!([m.lower, m.upper]));
    rec.insert("is_ray".into(), Value::Array(tested));
    if !surface.is_compact() {
        let a = asymptotic_profile(surface)?;
        rec.insert("maeda_bound".into(), json!(2.0 * PI - a.total_curvature));
    }
    Ok(())
}

fn constants(cfg: &RunConfig) -> Result<Record> {
    let c = strainer_constants(cfg.n, cfg.d, cfg.rmin, cfg.v1)?;
    let mut rec = base_record(cfg, None);
    rec.insert("value".into(), json!(c.c1));
    rec.insert("c1".into(), json!(c.c1));
    rec.insert("eps".into(), json!(c.eps));
    rec.insert("theta_n".into(), json!(theta_n(cfg.n, c.eps)?));
    rec.insert("inputs".into(), json!({"n": cfg.n, "D": cfg.d, "rmin": cfg.rmin, "v1": cfg.v1}));
    Ok(rec)
}

/// Round every float to 12 significant digits.
fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x.is_finite() {
                let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                json!(r)
            } else {
                Value::Null
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

const BASE_COLUMNS: [&str; 8] = [
    "command",
    "spec",
    "seed",
    "value",
    "ladder",
    "uncertainty",
    "convention_notes",
    "wall_time",
];

/// Serialize rows. JSON prints a single object when `array` is false and
/// there is exactly one row.
pub fn emit_report(rows: &[Record], format: Format, array: bool) -> Vec<u8> {
    let rows: Vec<Value> = rows.iter().map(|r| round_value(Value::Object(r.clone()))).collect();
    match format {
        Format::Json => {
            let doc = if !array && rows.len() == 1 {
                rows[0].clone()
            } else {
                Value::Array(rows)
            };
            let mut out = serde_json::to_vec_pretty(&doc).expect("values serialize");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut extra: Vec<String> = rows
                .iter()
                .filter_map(Value::as_object)
                .flat_map(|o| o.keys().cloned())
                .filter(|k| !BASE_COLUMNS.contains(&k.as_str()))
                .collect();
            extra.sort();
            extra.dedup();
            let columns: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).chain(extra).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&columns).expect("in-memory write");
            for row in &rows {
                let cells = columns.iter().map(|c| match row.get(c) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                });
                w.write_record(cells).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

fn load_spec(arg: &str) -> Result<SpaceSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Spec(format!("cannot read {arg}: {e}")))?
    };
    parse_space_spec(&text)
}

/// Parse arguments, run, write to `out`; returns the exit code.
pub fn run_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = RunConfig::from_options(args.command, &args.opts).and_then(|cfg| {
        let spec = args.opts.space.as_deref().map(load_spec).transpose()?;
        let rows = run_command(&cfg, spec.as_ref())?;
        Ok(emit_report(&rows, cfg.out, cfg.command == Command::Report))
    });
    match result {
        Ok(bytes) => {
            let _ = out.write_all(&bytes);
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_args(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
