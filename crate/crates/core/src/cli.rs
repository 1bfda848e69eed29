//! Command-line front end. Flags override a `key=value` config file (given
//! by `--config` or `RADLAB_CONFIG`), which overrides built-in defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::experiments::{
    verify_k_solutions_near_rstar, verify_multiplicity_small_a, verify_oscillation, verify_uniqueness, verify_window,
    ExperimentReport, ExperimentSettings, Status, DEFAULT_BUDGET, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::linear_modes::{lambda1_annulus, lambda1_ball, Domain, DEFAULT_EIGEN_TOL};
use crate::numerics::{lin_grid, log_grid};
use crate::radial_ode::{IntegratorConfig, ProblemParams, RadialProfile};
use crate::regions::{classify, corollary_window, jl_exponent, phi_boundaries, r0};
use crate::shooting::{
    count_annulus_solutions_with, count_ball_solutions_with, singular_zero, zero_map, BvpSolutionSet, ScanOptions,
    ShotParamKind, DEFAULT_ALPHA_RANGE, DEFAULT_BETA_RANGE, DEFAULT_GRID, SINGULAR_START,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const CONFIG_ENV: &str = "RADLAB_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_FAIL: i32 = 4;
pub const EXIT_INCONCLUSIVE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "radlab", version, about = "Radial solutions of the super-critical Brezis-Nirenberg problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainKind {
    Ball,
    Annulus,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count and refine Dirichlet solutions on a ball or an annulus.
    Solve { domain: DomainKind },
    /// Tabulate the zero map z(alpha).
    Zmap,
    /// Region atlas over (a, b) and the boundary curves.
    Regions,
    /// First zero of the singular solution.
    Rstar,
    /// First Dirichlet eigenvalue.
    Eigen { domain: DomainKind },
    /// Run a named experiment: uniqueness, multiplicity, oscillation, window, k-solutions.
    Verify { name: String },
}

#[derive(Debug, Default, Args)]
struct Flags {
    #[arg(long = "N", global = true)]
    dim: Option<u32>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Outer radius, or `auto` (z(1)) for the multiplicity experiment.
    #[arg(long, global = true)]
    b: Option<String>,
    #[arg(long, global = true)]
    rtol: Option<f64>,
    #[arg(long, global = true)]
    atol: Option<f64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long = "alpha-min", global = true)]
    alpha_min: Option<f64>,
    #[arg(long = "alpha-max", global = true)]
    alpha_max: Option<f64>,
    /// Required solution count for `verify k-solutions`.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Samples per case for `verify uniqueness`.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

/// Fully resolved inputs, embedded in every JSON emission.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub dim: u32,
    pub p: f64,
    pub lambda: f64,
    pub a: Option<f64>,
    pub b: Option<String>,
    pub rtol: f64,
    pub atol: f64,
    pub grid: Option<usize>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub budget: usize,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub k: Option<usize>,
    pub samples: Option<usize>,
    pub config_file: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Precondition(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return invalid(format!("{}:{}: expected key=value", path.display(), n + 1));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

const CONFIG_KEYS: &[&str] = &[
    "N", "p", "lambda", "a", "b", "rtol", "atol", "grid", "points", "out", "format", "seed", "budget", "alpha-min",
    "alpha-max", "k", "samples",
];

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| CliError::Invalid(format!("config key {key}: cannot parse {v:?}"))),
    }
}

fn resolve(flags: Flags, default_format: Format) -> CliResult<RunConfig> {
    let config_file = flags.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let file = match &config_file {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    if let Some(bad) = file.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return invalid(format!("unknown config key {bad:?}"));
    }
    let format = match flags.format {
        Some(f) => f,
        None => match file.get("format").map(String::as_str) {
            None => default_format,
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return invalid(format!("config key format: unknown format {other:?}")),
        },
    };
    let default_cfg = IntegratorConfig::default();
    Ok(RunConfig {
        dim: flags.dim.or(from_file(&file, "N")?).unwrap_or(3),
        p: flags.p.or(from_file(&file, "p")?).unwrap_or(7.0),
        lambda: flags.lambda.or(from_file(&file, "lambda")?).unwrap_or(1.0),
        a: flags.a.or(from_file(&file, "a")?),
        b: flags.b.or(from_file(&file, "b")?),
        rtol: flags.rtol.or(from_file(&file, "rtol")?).unwrap_or(default_cfg.rtol),
        atol: flags.atol.or(from_file(&file, "atol")?).unwrap_or(default_cfg.atol),
        grid: flags.grid.or(from_file(&file, "grid")?),
        points: flags.points.or(from_file(&file, "points")?),
        out: flags.out.or(from_file(&file, "out")?),
        format,
        seed: flags.seed.or(from_file(&file, "seed")?).unwrap_or(DEFAULT_SEED),
        budget: flags.budget.or(from_file(&file, "budget")?).unwrap_or(DEFAULT_BUDGET),
        alpha_min: flags.alpha_min.or(from_file(&file, "alpha-min")?),
        alpha_max: flags.alpha_max.or(from_file(&file, "alpha-max")?),
        k: flags.k.or(from_file(&file, "k")?),
        samples: flags.samples.or(from_file(&file, "samples")?),
        config_file,
    })
}

impl RunConfig {
    fn params(&self) -> CliResult<ProblemParams> {
        Ok(ProblemParams::new(self.dim, self.p, self.lambda)?)
    }

    fn integrator(&self) -> CliResult<IntegratorConfig> {
        let cfg = IntegratorConfig {
            rtol: self.rtol,
            atol: self.atol,
            ..IntegratorConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn require_a(&self) -> CliResult<f64> {
        self.a.ok_or_else(|| CliError::Invalid("--a is required".into()))
    }

    /// `--b` as a number; `auto` is rejected here.
    fn require_b(&self) -> CliResult<f64> {
        match self.b.as_deref() {
            None => invalid("--b is required"),
            Some(s) => s.parse().map_err(|_| CliError::Invalid(format!("--b: cannot parse {s:?}"))),
        }
    }

    fn grid_or(&self, default: usize) -> CliResult<usize> {
        let g = self.grid.unwrap_or(default);
        if g < 2 {
            return invalid(format!("--grid must be >= 2, got {g}"));
        }
        Ok(g)
    }

    fn points_or(&self, default: usize) -> CliResult<usize> {
        let n = self.points.unwrap_or(default);
        if n == 0 {
            return invalid("--points must be >= 1");
        }
        Ok(n)
    }

    fn alpha_range(&self, default: (f64, f64)) -> CliResult<(f64, f64)> {
        let r = (self.alpha_min.unwrap_or(default.0), self.alpha_max.unwrap_or(default.1));
        if !(r.0 > 0.0 && r.1 >= r.0 && r.1.is_finite()) {
            return invalid(format!("need 0 < alpha-min <= alpha-max, got {r:?}"));
        }
        Ok(r)
    }

    fn settings(&self) -> CliResult<ExperimentSettings> {
        if let Some(g) = self.grid {
            if g < 2 {
                return invalid(format!("--grid must be >= 2, got {g}"));
            }
        }
        Ok(ExperimentSettings {
            cfg: self.integrator()?,
            grid: self.grid,
            budget: self.budget,
            seed: self.seed,
        })
    }
}

/// Fixed 17-significant-digit CSV number.
pub fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `<dir>/<stem><suffix>` next to `out`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}{suffix}"))
}

fn profile_csv(profile: &RadialProfile) -> String {
    let mut s = String::from("r,u,uprime\n");
    for (r, u, up) in profile.rows() {
        let _ = writeln!(s, "{},{},{}", csv_number(r), csv_number(u), csv_number(up));
    }
    s
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let default_format = match cli.command {
        Command::Zmap => Format::Csv,
        _ => Format::Json,
    };
    let rc = resolve(cli.flags, default_format)?;
    match cli.command {
        Command::Solve { domain } => cmd_solve(&rc, domain),
        Command::Zmap => cmd_zmap(&rc),
        Command::Regions => cmd_regions(&rc),
        Command::Rstar => cmd_rstar(&rc),
        Command::Eigen { domain } => cmd_eigen(&rc, domain),
        Command::Verify { name } => cmd_verify(&rc, &name),
    }
}

fn cmd_solve(rc: &RunConfig, kind: DomainKind) -> CliResult<i32> {
    let params = rc.params()?;
    let cfg = rc.integrator()?;
    let b = rc.require_b()?;
    let grid = rc.grid_or(DEFAULT_GRID)?;
    let opts = ScanOptions::with_grid(grid);
    let set: BvpSolutionSet = match kind {
        DomainKind::Ball => {
            Domain::Ball { b }.validate()?;
            let range = rc.alpha_range(DEFAULT_ALPHA_RANGE)?;
            count_ball_solutions_with(&params, b, range, &opts, &cfg)?
        }
        DomainKind::Annulus => {
            let a = rc.require_a()?;
            Domain::Annulus { a, b }.validate()?;
            let range = rc.alpha_range(DEFAULT_BETA_RANGE)?;
            count_annulus_solutions_with(&params, a, b, ShotParamKind::InnerSlope, range, &opts, &cfg)?
        }
    };
    let mut solutions = Vec::new();
    for (i, s) in set.solutions.iter().enumerate() {
        let profile_path = match &rc.out {
            Some(out) => {
                let path = sibling(out, &format!("_profile_{i}.csv"));
                emit(Some(&path), &profile_csv(&s.profile))?;
                Some(path)
            }
            None => None,
        };
        solutions.push(json!({
            "param": s.param,
            "boundary_slope": s.outer_slope,
            "max_value": s.max_value,
            "residual": s.residual,
            "energy": s.energy,
            "profile_path": profile_path,
        }));
    }
    let text = match rc.format {
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "solve",
            "config": rc,
            "domain": set.domain,
            "params": params,
            "shot_param_kind": set.shot_param_kind,
            "solves": set.solves,
            "failed_points": set.failed_points(),
            "solutions": solutions,
        })),
        Format::Csv => {
            let mut s = String::from("param,boundary_slope,max_value\n");
            for x in &set.solutions {
                let _ = writeln!(s, "{},{},{}", csv_number(x.param), csv_number(x.outer_slope), csv_number(x.max_value));
            }
            s
        }
    };
    emit(rc.out.as_deref(), &text)?;
    Ok(if set.count() == 0 { EXIT_NO_SOLUTION } else { EXIT_OK })
}

fn cmd_zmap(rc: &RunConfig) -> CliResult<i32> {
    let params = rc.params()?;
    let cfg = rc.integrator()?;
    let (lo, hi) = rc.alpha_range((1e-4, 1e5))?;
    let n = rc.points_or(200)?;
    let alphas = if n == 1 { vec![lo] } else { log_grid(lo, hi, n) };
    let results: Vec<f64> = {
        use rayon::prelude::*;
        alphas
            .par_iter()
            .map(|&a| match zero_map(&params, a, &cfg) {
                Ok(z) => z,
                Err(e) => {
                    eprintln!("warning: alpha = {a}: {e}");
                    f64::NAN
                }
            })
            .collect()
    };
    let text = match rc.format {
        Format::Csv => {
            let mut s = String::from("alpha,z\n");
            for (a, z) in alphas.iter().zip(&results) {
                let _ = writeln!(s, "{},{}", csv_number(*a), csv_number(*z));
            }
            s
        }
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "zmap",
            "config": rc,
            "alpha": alphas,
            "z": results,
        })),
    };
    emit(rc.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn case_label(c: crate::regions::Case) -> &'static str {
    use crate::regions::Case::*;
    match c {
        CaseI => "CaseI",
        CaseII => "CaseII",
        CaseIII => "CaseIII",
        GapS => "GapS",
        NotApplicable => "NotApplicable",
    }
}

fn cmd_regions(rc: &RunConfig) -> CliResult<i32> {
    let params = rc.params()?;
    if params.dim != 3 || !(params.p > 5.0) {
        return invalid(format!("regions needs N = 3 and p > 5, got N = {}, p = {}", params.dim, params.p));
    }
    let (p, lambda) = (params.p, params.lambda);
    let span = PI / lambda.sqrt();
    let a_max = rc.a.unwrap_or(0.5 * span);
    let b_max = match &rc.b {
        Some(_) => rc.require_b()?,
        None => a_max + 1.2 * span,
    };
    if !(a_max > 0.0 && b_max > 0.0) {
        return invalid("atlas extents --a and --b must be positive");
    }
    let n = rc.grid_or(200)?;
    let m = rc.points_or(201)?.max(2);

    let mut atlas = String::from("a,b,case\n");
    for a in lin_grid(a_max / n as f64, a_max, n) {
        for b in lin_grid(b_max / n as f64, b_max, n) {
            if b <= a {
                continue;
            }
            let v = classify(&params, a, b)?;
            let _ = writeln!(atlas, "{},{},{}", csv_number(a), csv_number(b), case_label(v.case));
        }
    }
    let r0v = r0(&params)?;
    let at_r0 = phi_boundaries(p, lambda, r0v)?;
    let grid_a = lin_grid(0.0, a_max.max(r0v), m);
    let curves = grid_a.iter().map(|&a| phi_boundaries(p, lambda, a)).collect::<crate::Result<Vec<_>>>()?;
    let boundary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "regions",
        "config": rc,
        "r0": r0v,
        "intersection": at_r0,
        "curves": {
            "a": grid_a,
            "phi1": curves.iter().map(|c| c.phi1).collect::<Vec<_>>(),
            "phi2": curves.iter().map(|c| c.phi2).collect::<Vec<_>>(),
            "phi2_literal": curves.iter().map(|c| c.phi2_literal).collect::<Vec<_>>(),
            "phi3": curves.iter().map(|c| c.phi3).collect::<Vec<_>>(),
        },
        "lambda1_line": { "a": grid_a, "b": grid_a.iter().map(|a| a + span).collect::<Vec<_>>() },
        "window": corollary_window(p, lambda, 1.0)?,
        "jl_exponent": jl_exponent(params.dim)?,
        "atlas_path": rc.out.as_ref().map(|o| sibling(o, "_atlas.csv")),
    });
    match rc.format {
        Format::Csv => emit(rc.out.as_deref(), &atlas)?,
        Format::Json => {
            if let Some(out) = &rc.out {
                emit(Some(&sibling(out, "_atlas.csv")), &atlas)?;
            }
            emit(rc.out.as_deref(), &json_text(&boundary))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_rstar(rc: &RunConfig) -> CliResult<i32> {
    let params = rc.params()?;
    let cfg = rc.integrator()?;
    let starts = [10.0 * SINGULAR_START, SINGULAR_START];
    let values = starts.iter().map(|&r| singular_zero(&params, r, &cfg)).collect::<crate::Result<Vec<_>>>()?;
    let text = match rc.format {
        Format::Csv => {
            let mut s = String::from("r_start,r_star\n");
            for (r, z) in starts.iter().zip(&values) {
                let _ = writeln!(s, "{},{}", csv_number(*r), csv_number(*z));
            }
            s
        }
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "rstar",
            "config": rc,
            "r_star": values[1],
            "starts": starts,
            "values": values,
        })),
    };
    emit(rc.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_eigen(rc: &RunConfig, kind: DomainKind) -> CliResult<i32> {
    let b = rc.require_b()?;
    let res = match kind {
        DomainKind::Ball => lambda1_ball(rc.dim, b, DEFAULT_EIGEN_TOL)?,
        DomainKind::Annulus => lambda1_annulus(rc.dim, rc.require_a()?, b, DEFAULT_EIGEN_TOL)?,
    };
    let text = match rc.format {
        Format::Csv => format!("lambda1,bracket_lo,bracket_hi\n{},{},{}\n", csv_number(res.lambda1), csv_number(res.bracket.0), csv_number(res.bracket.1)),
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "eigen",
            "config": rc,
            "lambda1": res.lambda1,
            "bracket": [res.bracket.0, res.bracket.1],
        })),
    };
    emit(rc.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(rc: &RunConfig, name: &str) -> CliResult<i32> {
    let known = ["uniqueness", "multiplicity", "oscillation", "window", "k-solutions"];
    if !known.contains(&name) {
        return invalid(format!("unknown experiment {name:?}; expected one of {}", known.join(", ")));
    }
    let params = rc.params()?;
    let s = rc.settings()?;
    let report: ExperimentReport = match name {
        "uniqueness" => verify_uniqueness(&params, rc.samples.unwrap_or(DEFAULT_SAMPLES), &s)?,
        "multiplicity" => {
            let b = match rc.b.as_deref() {
                None | Some("auto") => None,
                Some(_) => Some(rc.require_b()?),
            };
            verify_multiplicity_small_a(&params, b, None, &s)?
        }
        "oscillation" => verify_oscillation(&params, rc.alpha_range((10.0, 1e5))?, rc.points_or(600)?, &s)?,
        "window" => verify_window(&params, None, &s)?,
        _ => verify_k_solutions_near_rstar(&params, rc.k.unwrap_or(2), None, &s)?,
    };
    let mut v = serde_json::to_value(&report).expect("serializable");
    if let Value::Object(m) = &mut v {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("config".into(), serde_json::to_value(rc).expect("serializable"));
    }
    emit(rc.out.as_deref(), &json_text(&v))?;
    Ok(match report.status {
        Status::Pass => EXIT_OK,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_have_seventeen_digits() {
        assert_eq!(csv_number(PI), "3.1415926535897931e0");
        assert_eq!(csv_number(f64::NAN), "NaN");
        let back: f64 = csv_number(0.1).parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn config_file_sits_between_flags_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\np = 9\nlambda = 2.5\ngrid=50\n").unwrap();
        let flags = Flags {
            p: Some(11.0),
            config: Some(path.clone()),
            ..Flags::default()
        };
        let rc = resolve(flags, Format::Json).unwrap();
        assert_eq!(rc.p, 11.0);
        assert_eq!(rc.lambda, 2.5);
        assert_eq!(rc.grid, Some(50));
        assert_eq!(rc.dim, 3);
        assert_eq!(rc.rtol, IntegratorConfig::default().rtol);

        std::fs::write(&path, "nosuch = 1\n").unwrap();
        let flags = Flags {
            config: Some(path),
            ..Flags::default()
        };
        assert!(matches!(resolve(flags, Format::Json), Err(CliError::Invalid(_))));
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Path::new("/x/run.json"), "_atlas.csv"), PathBuf::from("/x/run_atlas.csv"));
    }

    #[test]
    fn exit_codes_for_bad_input() {
        assert_eq!(run(["radlab", "solve", "annulus", "--a", "2", "--b", "1"]), EXIT_INVALID);
        assert_eq!(run(["radlab", "verify", "nosuch"]), EXIT_INVALID);
        assert_eq!(run(["radlab", "regions", "--p", "5"]), EXIT_INVALID);
        assert_eq!(run(["radlab", "zmap", "--p", "0.5"]), EXIT_INVALID);
        assert_eq!(run(["radlab", "bogus"]), EXIT_INVALID);
    }
}
