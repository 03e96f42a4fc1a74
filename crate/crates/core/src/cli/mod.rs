//! Config parsing and experiment runners behind the `boltzkit` binary.
//!
//! A config is a list of `key = value` lines; `#` starts a comment. Every
//! command has a fixed key table with defaults, and unknown keys are errors.
//! Each run writes `<out>.json` (and `<out>.csv` where the result is tabular)
//! and returns exit code 0 on pass, 1 on a failed verdict, 2 on errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::collision::{annihilation_sweep, CollisionKernelSpec, Route};
use crate::estimates::{
    bilinear_study, strichartz_study, BilinearCase, BilinearParams, DataFamily, StrichartzStudy, Verdict,
};
use crate::hierarchy::{
    board_game_identity, catalan, class_table_csv, duhamel_reconstruction, enumerate_collapse_maps, km_classes,
    Collider,
};
use crate::solver::{
    mass, maxwellian, perturbed_maxwellian, solve, uniqueness_experiment, write_snapshot, Scheme, SolverConfig,
};
use crate::spectral_core::{DyadicLevel, PhaseField, Repr, SpectralGrid};
use crate::{Error, Result, C64, CONVENTION_VERSION};

/// Version of the report layout.
pub const REPORT_SCHEMA: &str = "boltzkit-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Strichartz,
    Bilinear,
    Annihilation,
    Boardgame,
    Duhamel,
    Uniqueness,
    Solve,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Strichartz,
        Command::Bilinear,
        Command::Annihilation,
        Command::Boardgame,
        Command::Duhamel,
        Command::Uniqueness,
        Command::Solve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Strichartz => "strichartz",
            Command::Bilinear => "bilinear",
            Command::Annihilation => "annihilation",
            Command::Boardgame => "boardgame",
            Command::Duhamel => "duhamel",
            Command::Uniqueness => "uniqueness",
            Command::Solve => "solve",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    List(Vec<f64>),
    Text(String),
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Int,
    Float,
    List,
    Choice(&'static [&'static str]),
}

type KeySpec = (&'static str, Kind, Option<&'static str>);

const ROUTES: &[&str] = &["bobylev", "direct"];

const GRID_KEYS: [KeySpec; 4] = [
    ("d", Kind::Int, Some("2")),
    ("nx", Kind::Int, Some("4")),
    ("nv", Kind::Int, Some("16")),
    ("v_max", Kind::Float, Some("6.0")),
];

const KERNEL_KEYS: [KeySpec; 3] = [
    ("gamma", Kind::Float, Some("0.0")),
    ("n_sphere", Kind::Int, Some("12")),
    ("route", Kind::Choice(ROUTES), Some("bobylev")),
];

fn schema(cmd: Command) -> Vec<KeySpec> {
    let mut keys: Vec<KeySpec> = match cmd {
        Command::Strichartz => vec![
            ("d", Kind::Int, Some("2")),
            ("p", Kind::Float, Some("4.0")),
            ("m", Kind::Float, Some("1.0")),
            ("levels", Kind::List, Some("4,8,16,32")),
            ("t", Kind::Float, Some("1.0")),
            ("samples", Kind::Int, Some("64")),
            ("time_samples", Kind::Int, Some("65")),
            ("nv", Kind::Int, Some("8")),
            ("v_max", Kind::Float, Some("4.0")),
            ("slack", Kind::Float, Some("0.1")),
            ("family", Kind::Choice(&["gaussian", "concentrated"]), Some("gaussian")),
        ],
        Command::Bilinear => {
            let mut k = vec![
                ("case", Kind::Choice(&["loss", "gain", "full"]), Some("full")),
                ("d", Kind::Int, Some("2")),
                ("nx", Kind::Int, Some("4")),
                ("nv", Kind::List, Some("16,32")),
                ("v_max", Kind::Float, Some("6.0")),
                ("s", Kind::Float, Some("0.8")),
                ("s1", Kind::Float, Some("0.0")),
                ("r", Kind::Float, Some("1.3")),
                ("t", Kind::Float, Some("0.5")),
                ("time_nodes", Kind::Int, Some("2")),
                ("kx", Kind::Int, Some("1")),
                ("samples", Kind::Int, Some("64")),
                ("slack", Kind::Float, Some("1.0")),
            ];
            k.extend(KERNEL_KEYS);
            k
        }
        Command::Annihilation => vec![
            ("d", Kind::Int, Some("2")),
            ("nx", Kind::Int, Some("4")),
            ("nv", Kind::Int, Some("32")),
            ("v_max", Kind::Float, Some("16.0")),
            ("n_sphere", Kind::Int, Some("8")),
            ("n_zhat", Kind::Int, Some("8")),
            ("n_radial", Kind::Int, Some("8")),
        ],
        Command::Boardgame => vec![
            ("k", Kind::Int, None),
            ("identity_points", Kind::Int, Some("0")),
            ("t1", Kind::Float, Some("0.5")),
        ],
        Command::Duhamel => {
            let mut k = vec![
                ("k", Kind::Int, Some("2")),
                ("t1", Kind::Float, Some("0.5")),
                ("n_quad", Kind::Int, Some("4")),
                ("dt", Kind::Float, Some("0.01")),
                ("amp", Kind::Float, Some("0.4")),
                ("tol", Kind::Float, Some("1e-3")),
            ];
            k.extend(GRID_KEYS);
            k.extend(KERNEL_KEYS);
            override_default(&mut k, "nv", "8");
            override_default(&mut k, "v_max", "5.0");
            k
        }
        Command::Uniqueness => {
            let mut k = vec![
                ("dt_a", Kind::Float, Some("0.05")),
                ("dt_b", Kind::Float, Some("0.05")),
                ("amp_a", Kind::Float, Some("0.4")),
                ("amp_b", Kind::Float, Some("0.4")),
                ("t", Kind::Float, Some("0.5")),
                ("n_samples", Kind::Int, Some("5")),
                ("s", Kind::Float, Some("0.8")),
                ("r", Kind::Float, Some("1.3")),
            ];
            k.extend(GRID_KEYS);
            k.extend(KERNEL_KEYS);
            k
        }
        Command::Solve => {
            let mut k = vec![
                ("dt", Kind::Float, Some("0.05")),
                ("t_end", Kind::Float, Some("0.5")),
                ("n_samples", Kind::Int, Some("5")),
                ("amp", Kind::Float, Some("0.4")),
                ("scheme", Kind::Choice(&["strang", "lie"]), Some("strang")),
            ];
            k.extend(GRID_KEYS);
            k.extend(KERNEL_KEYS);
            k
        }
    };
    keys.sort_by_key(|k| k.0);
    keys
}

fn override_default(keys: &mut [KeySpec], name: &str, value: &'static str) {
    if let Some(k) = keys.iter_mut().find(|k| k.0 == name) {
        k.2 = Some(value);
    }
}

fn parse_value(kind: Kind, raw: &str) -> std::result::Result<ParamValue, String> {
    let float = |s: &str| -> std::result::Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    };
    match kind {
        Kind::Int => raw
            .parse::<i64>()
            .map(ParamValue::Int)
            .map_err(|_| format!("`{raw}` is not an integer")),
        Kind::Float => float(raw).map(ParamValue::Float),
        Kind::List => raw
            .split(',')
            .map(float)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ParamValue::List),
        Kind::Choice(opts) => {
            if opts.contains(&raw) {
                Ok(ParamValue::Text(raw.to_string()))
            } else {
                Err(format!("`{raw}` is not one of {}", opts.join(", ")))
            }
        }
    }
}

/// A parsed and defaulted experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: BTreeMap<String, ParamValue>,
    pub seed: u64,
    pub out_path: PathBuf,
}

impl ExperimentConfig {
    fn missing(key: &str) -> Error {
        Error::Config(format!("parameter `{key}` is not set"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.params.get(key) {
            Some(ParamValue::Float(v)) => Ok(*v),
            Some(ParamValue::Int(v)) => Ok(*v as f64),
            _ => Err(Self::missing(key)),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        match self.params.get(key) {
            Some(ParamValue::Int(v)) if *v >= 0 => Ok(*v as usize),
            Some(ParamValue::Int(v)) => Err(Error::Config(format!("`{key}` = {v} must be >= 0"))),
            _ => Err(Self::missing(key)),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.params.get(key) {
            Some(ParamValue::List(v)) => Ok(v.clone()),
            _ => Err(Self::missing(key)),
        }
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        match self.params.get(key) {
            Some(ParamValue::Text(v)) => Ok(v),
            _ => Err(Self::missing(key)),
        }
    }
}

/// Parse a config whose `command` key names the experiment.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_for(text, None)
}

/// Parse a config; `command` is used when the text has no `command` key and must match otherwise.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<ExperimentConfig> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| perr(line, format!("expected `key = value`, got `{body}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(perr(line, "empty key or value".into()));
        }
        if entries.iter().any(|(_, key, _)| key == k) {
            return Err(perr(line, format!("duplicate key `{k}`")));
        }
        entries.push((line, k.to_string(), v.to_string()));
    }
    let mut cmd = command;
    if let Some((line, _, v)) = entries.iter().find(|(_, k, _)| k == "command") {
        let c: Command = v.parse().map_err(|m| perr(*line, m))?;
        if command.is_some_and(|given| given != c) {
            return Err(perr(*line, format!("config is for `{c}`, not `{}`", command.unwrap())));
        }
        cmd = Some(c);
    }
    let cmd = cmd.ok_or_else(|| perr(0, "missing key `command`".into()))?;
    let keys = schema(cmd);
    let mut params = BTreeMap::new();
    let mut seed = 0u64;
    let mut out_path = PathBuf::from(format!("boltzkit-{cmd}"));
    for (line, k, v) in &entries {
        match k.as_str() {
            "command" => {}
            "seed" => {
                seed = v
                    .parse()
                    .map_err(|_| perr(*line, format!("seed `{v}` must be an integer >= 0")))?;
            }
            "out" => out_path = PathBuf::from(v),
            _ => {
                let spec = keys
                    .iter()
                    .find(|s| s.0 == k)
                    .ok_or_else(|| perr(*line, format!("unknown key `{k}` for `{cmd}`")))?;
                let value = parse_value(spec.1, v).map_err(|m| perr(*line, format!("`{k}`: {m}")))?;
                params.insert(k.clone(), value);
            }
        }
    }
    for (name, kind, default) in &keys {
        if params.contains_key(*name) {
            continue;
        }
        let d = default.ok_or_else(|| perr(0, format!("missing key `{name}` for `{cmd}`")))?;
        params.insert(name.to_string(), parse_value(*kind, d).expect("valid default"));
    }
    Ok(ExperimentConfig {
        command: cmd,
        params,
        seed,
        out_path,
    })
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub code: i32,
    /// One-line summary for stdout.
    pub summary: String,
    pub files: Vec<PathBuf>,
}

struct Outcome {
    passed: bool,
    result: serde_json::Value,
    csv: Option<String>,
    summary: String,
}

/// Writes every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

/// Serialise with 17 significant digits per float.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

fn with_ext(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Run an experiment and write its reports.
pub fn run(cfg: &ExperimentConfig) -> RunOutcome {
    let mut files = Vec::new();
    let json_path = with_ext(&cfg.out_path, "json");
    let (code, summary, body) = match execute(cfg) {
        Ok(out) => {
            if let Some(csv) = &out.csv {
                let p = with_ext(&cfg.out_path, "csv");
                if let Err(e) = fs::write(&p, csv) {
                    return io_failure(cfg, e);
                }
                files.push(p);
            }
            let body = json!({
                "schema": REPORT_SCHEMA,
                "convention": CONVENTION_VERSION,
                "command": cfg.command,
                "config": cfg,
                "passed": out.passed,
                "result": out.result,
            });
            (if out.passed { 0 } else { 1 }, out.summary, body)
        }
        Err(e) => (2, format!("{}: error: {e}", cfg.command), error_json(Some(cfg), &e)),
    };
    match to_json_string(&body).and_then(|s| fs::write(&json_path, s).map_err(Error::from)) {
        Ok(()) => files.push(json_path),
        Err(e) => return io_failure(cfg, e),
    }
    RunOutcome { code, summary, files }
}

fn io_failure(cfg: &ExperimentConfig, e: impl fmt::Display) -> RunOutcome {
    RunOutcome {
        code: 2,
        summary: format!("{}: error: cannot write report: {e}", cfg.command),
        files: Vec::new(),
    }
}

/// Structured error report.
pub fn error_json(cfg: Option<&ExperimentConfig>, e: &Error) -> serde_json::Value {
    let kind = match e {
        Error::Config(_) => "config",
        Error::UnsupportedDimension(_) => "unsupported-dimension",
        Error::Range(_) => "range",
        Error::Geometry(_) => "geometry",
        Error::UnsupportedRegime(_) => "unsupported-regime",
        Error::NumericalRange { .. } => "numerical-range",
        Error::Instability { .. } => "instability",
        Error::InsufficientData(_) => "insufficient-data",
        Error::Parse { .. } => "parse",
        Error::Io(_) => "io",
    };
    let line = match e {
        Error::Parse { line, .. } => Some(*line),
        _ => None,
    };
    json!({
        "schema": REPORT_SCHEMA,
        "convention": CONVENTION_VERSION,
        "config": cfg,
        "error": { "kind": kind, "message": e.to_string(), "line": line },
    })
}

fn kernel(cfg: &ExperimentConfig) -> Result<(CollisionKernelSpec, Route)> {
    let spec = CollisionKernelSpec {
        gamma: cfg.f64("gamma")?,
        n_sphere: cfg.usize("n_sphere")?,
        ..Default::default()
    };
    let route = match cfg.text("route")? {
        "direct" => Route::Direct,
        _ => Route::Bobylev,
    };
    Ok((spec, route))
}

fn grid(cfg: &ExperimentConfig) -> Result<SpectralGrid> {
    SpectralGrid::torus(cfg.usize("d")?, cfg.usize("nx")?, cfg.usize("nv")?, cfg.f64("v_max")?)
}

fn solver_cfg(cfg: &ExperimentConfig, dt: f64, t_end: f64) -> Result<SolverConfig> {
    let (spec, route) = kernel(cfg)?;
    let mut s = SolverConfig::new(grid(cfg)?, spec, dt, t_end);
    s.route = route;
    s.validate()?;
    Ok(s)
}

/// `(1 + amp cos x1) M + M_bump / 2`, a non-equilibrium state with a drifting bump.
fn initial_state(grid: SpectralGrid, amp: f64) -> PhaseField {
    let u = [1.2, -0.5, 0.0];
    perturbed_maxwellian(grid, amp).axpy(C64::new(0.5, 0.0), &maxwellian(grid, 0.5, &u[..grid.d], 0.6))
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Strichartz => run_strichartz(cfg),
        Command::Bilinear => run_bilinear(cfg),
        Command::Annihilation => run_annihilation(cfg),
        Command::Boardgame => run_boardgame(cfg),
        Command::Duhamel => run_duhamel(cfg),
        Command::Uniqueness => run_uniqueness(cfg),
        Command::Solve => run_solve(cfg),
    }
}

fn run_strichartz(cfg: &ExperimentConfig) -> Result<Outcome> {
    let study = StrichartzStudy {
        d: cfg.usize("d")?,
        p: cfg.f64("p")?,
        t: cfg.f64("t")?,
        m: cfg.f64("m")?,
        levels: cfg.list("levels")?,
        nv: cfg.usize("nv")?,
        v_max: cfg.f64("v_max")?,
        samples: cfg.usize("samples")?,
        seed: cfg.seed,
        time_samples: cfg.usize("time_samples")?,
        family: match cfg.text("family")? {
            "concentrated" => DataFamily::Concentrated,
            _ => DataFamily::Gaussian,
        },
        slack: cfg.f64("slack")?,
    };
    let (report, rows) = strichartz_study(&study)?;
    let passed = report.verdict == Verdict::Pass;
    Ok(Outcome {
        passed,
        summary: format!(
            "strichartz: slope {:.4} vs theory {:.4} + slack {} -> {}",
            report.fitted_slope,
            report.theory_slope,
            report.slack,
            if passed { "pass" } else { "fail" }
        ),
        csv: Some(report.to_csv()?),
        result: json!({ "report": report, "rows": rows }),
    })
}

fn run_bilinear(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (spec, route) = kernel(cfg)?;
    let params = BilinearParams {
        kernel: spec,
        route,
        s: cfg.f64("s")?,
        s1: cfg.f64("s1")?,
        r: cfg.f64("r")?,
        t: cfg.f64("t")?,
        time_nodes: cfg.usize("time_nodes")?,
        kx: cfg.usize("kx")?,
    };
    let case = match cfg.text("case")? {
        "loss" => BilinearCase::Loss,
        "gain" => BilinearCase::Gain,
        _ => BilinearCase::Full,
    };
    let (d, nx, v_max) = (cfg.usize("d")?, cfg.usize("nx")?, cfg.f64("v_max")?);
    let grids = cfg
        .list("nv")?
        .iter()
        .map(|&nv| {
            if nv.fract() != 0.0 || nv < 0.0 {
                return Err(Error::Config(format!("nv = {nv} is not a grid size")));
            }
            SpectralGrid::torus(d, nx, nv as usize, v_max)
        })
        .collect::<Result<Vec<_>>>()?;
    let (report, rows) = bilinear_study(
        case,
        &params,
        &grids,
        cfg.usize("samples")?,
        cfg.seed,
        cfg.f64("slack")?,
    )?;
    let passed = report.verdict == Verdict::Pass;
    Ok(Outcome {
        passed,
        summary: format!(
            "bilinear: max ratios {:?}, largest log2 change {:.4} -> {}",
            report.ratios,
            report.fitted_slope,
            if passed { "pass" } else { "fail" }
        ),
        csv: Some(report.to_csv()?),
        result: json!({ "report": report, "rows": rows }),
    })
}

fn random_xi_field(grid: SpectralGrid, seed: u64) -> PhaseField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..grid.len())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    PhaseField::from_data(grid, Repr::XV, data)
        .expect("length matches the grid")
        .to(Repr::XXi)
}

fn run_annihilation(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = SpectralGrid::torus(cfg.usize("d")?, cfg.usize("nx")?, cfg.usize("nv")?, cfg.f64("v_max")?)?;
    let spec = CollisionKernelSpec {
        n_sphere: cfg.usize("n_sphere")?,
        n_zhat: cfg.usize("n_zhat")?,
        n_radial: cfg.usize("n_radial")?,
        ..Default::default()
    };
    let f = random_xi_field(g, cfg.seed);
    let h = random_xi_field(g, cfg.seed.wrapping_add(1));
    let levels = DyadicLevel::up_to(g.v_max);
    let rows = annihilation_sweep(&f, &h, &levels, &spec)?;
    let asserted: Vec<_> = rows.iter().filter(|r| r.asserted).collect();
    let worst = asserted.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let passed = rows.iter().all(|r| r.passed);
    let csv = csv_rows(
        &["m", "m1", "m2", "ratio", "asserted", "passed"],
        rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.m1.to_string(),
                r.m2.to_string(),
                num(r.ratio),
                r.asserted.to_string(),
                r.passed.to_string(),
            ]
        }),
    )?;
    Ok(Outcome {
        passed,
        summary: format!(
            "annihilation: {} triples, {} in the vanishing regime, worst ratio {worst:.3e} -> {}",
            rows.len(),
            asserted.len(),
            if passed { "pass" } else { "fail" }
        ),
        csv: Some(csv),
        result: json!({ "triples": rows, "asserted": asserted.len(), "worst_asserted_ratio": worst }),
    })
}

fn run_boardgame(cfg: &ExperimentConfig) -> Result<Outcome> {
    let k = cfg.usize("k")?;
    let maps = enumerate_collapse_maps(k)?;
    let classes = km_classes(k)?;
    let factorial: usize = (1..=k).product();
    let bound = 4f64.powi(k as i32);
    let mut passed = maps.len() == factorial && classes.len() as u64 == catalan(k) && (classes.len() as f64) <= bound;
    let points = cfg.usize("identity_points")?;
    let identity = if points > 0 {
        let g = SpectralGrid::torus(2, 4, 8, 5.0)?;
        let op = Collider::new(
            CollisionKernelSpec {
                n_sphere: 12,
                ..Default::default()
            },
            Route::Bobylev,
        );
        let r = board_game_identity(&initial_state(g, 0.4), k, cfg.f64("t1")?, points, cfg.seed, &op)?;
        passed &= r.passed;
        Some(r)
    } else {
        None
    };
    let table: Vec<_> = classes
        .iter()
        .map(|c| json!({ "canonical_map": c.representative.to_string(), "class_size": c.size() }))
        .collect();
    Ok(Outcome {
        passed,
        summary: format!(
            "boardgame: k = {k}, {} maps in {} classes (4^k = {bound}) -> {}",
            maps.len(),
            classes.len(),
            if passed { "pass" } else { "fail" }
        ),
        csv: Some(class_table_csv(&classes)?),
        result: json!({
            "k": k,
            "n_maps": maps.len(),
            "n_classes": classes.len(),
            "catalan": catalan(k),
            "bound": bound,
            "classes": table,
            "identity": identity,
        }),
    })
}

fn run_duhamel(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t1 = cfg.f64("t1")?;
    let s = solver_cfg(cfg, cfg.f64("dt")?, t1)?;
    let f0 = initial_state(s.grid, cfg.f64("amp")?);
    let r = duhamel_reconstruction(&f0, &s, cfg.usize("k")?, t1, cfg.usize("n_quad")?)?;
    let tol = cfg.f64("tol")?;
    let passed = r.rel_error < tol;
    let csv = csv_rows(
        &["level", "norm"],
        r.level_norms
            .iter()
            .enumerate()
            .map(|(i, n)| vec![(i + 1).to_string(), num(*n)]),
    )?;
    Ok(Outcome {
        passed,
        summary: format!(
            "duhamel: k = {}, relative error {:.3e} (tolerance {tol:e}) -> {}",
            r.k,
            r.rel_error,
            if passed { "pass" } else { "fail" }
        ),
        csv: Some(csv),
        result: to_value(&r),
    })
}

fn run_uniqueness(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t = cfg.f64("t")?;
    let a = solver_cfg(cfg, cfg.f64("dt_a")?, t)?;
    let b = solver_cfg(cfg, cfg.f64("dt_b")?, t)?;
    let fa = initial_state(a.grid, cfg.f64("amp_a")?);
    let fb = initial_state(b.grid, cfg.f64("amp_b")?);
    let (sv, rv) = (cfg.f64("s")?, cfg.f64("r")?);
    let r = uniqueness_experiment(&fa, &fb, &a, &b, t, cfg.usize("n_samples")?, sv, rv)?;
    let csv = csv_rows(
        &["t", "l2", "sobolev"],
        r.rows.iter().map(|g| vec![num(g.t), num(g.l2), num(g.sobolev)]),
    )?;
    Ok(Outcome {
        passed: true,
        summary: format!(
            "uniqueness: sup gap {:.3e} in L2, {:.3e} in H^s L^2,r",
            r.sup_l2, r.sup_sobolev
        ),
        csv: Some(csv),
        result: to_value(&r),
    })
}

fn run_solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t_end = cfg.f64("t_end")?;
    let mut s = solver_cfg(cfg, cfg.f64("dt")?, t_end)?;
    s.scheme = match cfg.text("scheme")? {
        "lie" => Scheme::Lie,
        _ => Scheme::Strang,
    };
    let f0 = initial_state(s.grid, cfg.f64("amp")?);
    let n = cfg.usize("n_samples")?.max(1);
    let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    let traj = solve(&f0, &s, &times)?;
    let mut stem = cfg.out_path.as_os_str().to_owned();
    stem.push("-snapshot");
    let stem = PathBuf::from(stem);
    write_snapshot(&traj, &stem)?;
    let m0 = mass(&f0);
    let rows: Vec<(f64, f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.fields)
        .map(|(t, f)| (*t, mass(f), f.l2_norm()))
        .collect();
    let drift = rows.iter().map(|r| (r.1 - m0).abs()).fold(0.0, f64::max);
    let csv = csv_rows(
        &["t", "mass", "l2"],
        rows.iter().map(|r| vec![num(r.0), num(r.1), num(r.2)]),
    )?;
    Ok(Outcome {
        passed: true,
        summary: format!("solve: {} samples to t = {t_end}, mass drift {drift:.3e}", times.len()),
        csv: Some(csv),
        result: json!({
            "times": traj.times,
            "mass": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
            "l2": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
            "mass_drift": drift,
            "snapshot": stem,
        }),
    })
}
